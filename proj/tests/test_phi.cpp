// The limit operator on the catalog, the stable closed forms, the composite
// classical-side map, and the verification drivers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "freemax/law.hpp"
#include "freemax/maxconv.hpp"
#include "freemax/measure_ops.hpp"
#include "freemax/phi.hpp"
#include "freemax/transforms.hpp"
#include "freemax/verify.hpp"

using namespace freemax;

namespace {
const Law kSigma{TwoPoint{0.5, 2.0}};
const Law kMp1{MarchenkoPastur{1.0}};
}

TEST_CASE("limit operator on the closed catalog") {
    // free poisson maps to the uniform
    PhiResult u = phi(kMp1);
    CHECK(u.closed);
    CHECK(u.atom_at_zero == 0.0);
    CHECK(u.a == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(u.b == doctest::Approx(1.0).epsilon(1e-9));
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
        CHECK(u.cdf(x) == doctest::Approx(x).epsilon(1e-6));
    CHECK(u.cdf(1.2) == doctest::Approx(1.0));
    CHECK(u.cdf(-0.1) == 0.0);

    // two-point maps to 1/(2-x) on (0,1) with the atom preserved
    PhiResult s = phi(kSigma);
    CHECK(s.atom_at_zero == doctest::Approx(0.5));
    CHECK(s.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));
    for (double x : {0.2, 0.5, 0.8})
        CHECK(s.cdf(x) == doctest::Approx(1.0 / (2.0 - x)).epsilon(1e-8));
    CHECK(s.cdf(1.0) == doctest::Approx(1.0));

    // dirac inputs are fixed points
    PhiResult d = phi(Law(Dirac{2.5}));
    CHECK(d.cdf(2.4) == 0.0);
    CHECK(d.cdf(2.5) == doctest::Approx(1.0));
}

TEST_CASE("stable closed forms and their images") {
    STransform sf = stable_s_transform(0.5, StableKind::free);
    for (double z : {-0.9, -0.5, -0.1})
        CHECK(sf(z) == doctest::Approx(-z).epsilon(1e-12));
    PhiResult pf = phi(sf);
    for (double x : {1.5, 2.0, 5.0, 40.0})
        CHECK(pf.cdf(x) == doctest::Approx(1.0 - 1.0 / x).epsilon(1e-8));
    CHECK(pf.cdf(2.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(pf.cdf(0.9) == 0.0);

    STransform sb = stable_s_transform(0.5, StableKind::boolean_);
    for (double z : {-0.8, -0.4, -0.1})
        CHECK(sb(z) == doctest::Approx(-z / (1.0 + z)).epsilon(1e-12));
    // the midpoint value is 1 regardless of the index
    for (double alpha : {0.3, 0.5, 0.7})
        CHECK(stable_s_transform(alpha, StableKind::boolean_)(-0.5) ==
              doctest::Approx(1.0).epsilon(1e-12));
    PhiResult pb = phi(sb);
    Law dagum{Dagum{1.0}};
    for (double x : {0.3, 1.0, 2.0, 10.0})
        CHECK(pb.cdf(x) == doctest::Approx(dagum.cdf(x)).epsilon(1e-8));

    CHECK_THROWS_AS(stable_s_transform(0.0, StableKind::free), std::invalid_argument);
    CHECK_THROWS_AS(stable_s_transform(1.0, StableKind::boolean_), std::invalid_argument);

    // general index: the free alpha-stable image is pareto of index
    // alpha/(1-alpha), so alpha = 1/3 lands on index 1/2
    STransform s3 = stable_s_transform(1.0 / 3.0, StableKind::free);
    PhiResult p3 = phi(s3);
    for (double x : {1.2, 2.0, 6.0})
        CHECK(p3.cdf(x) == doctest::Approx(1.0 - 1.0 / std::sqrt(x)).epsilon(1e-8));
}

TEST_CASE("limit operator through the grid pipeline") {
    PhiResult u = phi(grid_from_law(kMp1, 2048));
    CHECK(!u.closed);
    for (double x : {0.2, 0.5, 0.8})
        CHECK(u.cdf(x) == doctest::Approx(x).epsilon(1e-3));

    // atom preservation along the grid path
    PhiResult h = phi(grid_from_law(Law(MarchenkoPastur{0.5}), 2048));
    CHECK(h.atom_at_zero == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(h.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("limit operator commutes with dilation") {
    // closed two-point path: exact rational identity
    PhiResult base = phi(kSigma);
    PhiResult scaled = phi(dilate(kSigma, 2.0));
    for (double x : {0.3, 0.9, 1.5})
        CHECK(scaled.cdf(x) == doctest::Approx(base.cdf(x / 2.0)).epsilon(1e-8));

    // grid path
    PhiResult gbase = phi(grid_from_law(kMp1, 2048));
    PhiResult gscaled = phi(dilate(grid_from_law(kMp1, 2048), 1.5));
    for (double x : {0.3, 0.75, 1.2})
        CHECK(gscaled.cdf(x) == doctest::Approx(gbase.cdf(x / 1.5)).epsilon(1e-3));
}

TEST_CASE("image support is exactly the moment interval") {
    PhiResult u = phi(kMp1);   // (a, b) = (0, 1)
    const double h = 1e-4;
    for (double x : {0.1, 0.5, 0.9})
        CHECK(u.cdf(x + h) - u.cdf(x - h) > 0.0);
    CHECK(u.cdf(1.0 + 1e-6) == doctest::Approx(1.0));

    // two-point: continuous exactly on (0, 1), constant atop the atom below
    PhiResult s = phi(kSigma);
    CHECK(s.cdf(-1e-9) == 0.0);
    CHECK(s.cdf(0.97) < 1.0);
    CHECK(s.cdf(1.0) == doctest::Approx(1.0));
}

TEST_CASE("classical-side inverse catalog") {
    Law tp = chi_inverse_catalog(Law(Poisson{1.0}));
    REQUIRE(tp.is<TwoPoint>());
    CHECK(tp.as<TwoPoint>().mass_at_zero == doctest::Approx(0.5));
    CHECK(tp.as<TwoPoint>().location == doctest::Approx(2.0));

    Law tp2 = chi_inverse_catalog(Law(Poisson{2.0}));
    REQUIRE(tp2.is<TwoPoint>());
    CHECK(tp2.as<TwoPoint>().mass_at_zero == doctest::Approx(1.0 / 3.0));
    CHECK(tp2.as<TwoPoint>().location == doctest::Approx(3.0));

    // consistency with the boolean power route: the two-point image of
    // poisson:2 carries the same atoms as the uplus square of sigma
    GridMeasure viaPower = boolean_add_power(kSigma, 2.0);
    auto atoms = tp2.atoms();
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0].mass == doctest::Approx(viaPower.atoms()[0].mass).epsilon(1e-9));
    CHECK(atoms[1].location ==
          doctest::Approx(viaPower.atoms()[1].location).epsilon(1e-9));

    Law bs = chi_inverse_catalog(Law(ClassicalStablePos{0.5}));
    REQUIRE(bs.is<BooleanStablePos>());
    CHECK(bs.as<BooleanStablePos>().alpha == doctest::Approx(0.5));

    CHECK_THROWS_AS(chi_inverse_catalog(kMp1), std::invalid_argument);
    CHECK_THROWS_AS(chi_inverse_catalog(Law(Uniform01{})), std::invalid_argument);
}

TEST_CASE("composite classical map") {
    Cdf po1 = psi_op(Law(Poisson{1.0}));
    CHECK(po1(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    for (double x : {0.3, 0.7})
        CHECK(po1(x) == doctest::Approx(std::exp(-1.0 + x)).epsilon(1e-10));
    CHECK(po1(1.0) == doctest::Approx(1.0).epsilon(1e-10));

    Cdf po2 = psi_op(Law(Poisson{2.0}));
    CHECK(po2(0.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    CHECK(po2(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(po2(2.0) == doctest::Approx(1.0).epsilon(1e-10));

    // classical stable goes to frechet of the transformed index
    Cdf fr = psi_op(Law(ClassicalStablePos{0.5}));
    for (double x : {0.4, 1.0, 3.0})
        CHECK(fr(x) == doctest::Approx(std::exp(-1.0 / x)).epsilon(1e-8));

    CHECK_THROWS_AS(psi_op(kMp1), std::invalid_argument);
}

TEST_CASE("diagram consistency on the poisson node") {
    // the log map applied to the composite image gives back the uniform,
    // which is also the limit image of the free poisson
    Cdf lhs = lambda_vee(psi_op(Law(Poisson{1.0})));
    PhiResult rhs = phi(kMp1);
    for (double x : {0.1, 0.4, 0.8})
        CHECK(lhs(x) == doctest::Approx(x).epsilon(1e-10));
    for (double x : {0.1, 0.4, 0.8})
        CHECK(lhs(x) == doctest::Approx(rhs.cdf(x)).epsilon(1e-6));
}

TEST_CASE("free-regular image of the composite operator") {
    // B_1 sends the two-point law to the free poisson, whose limit image is
    // uniform; the formula max(0, 2 - 1/phi(sigma)) gives the same answer
    GridMeasure m = b_t_operator(kSigma, 1.0);
    PhiResult p = phi(m);
    PhiResult ps = phi(kSigma);
    for (double x : {0.2, 0.5, 0.8}) {
        CHECK(p.cdf(x) == doctest::Approx(x).epsilon(1e-3));
        CHECK(std::max(0.0, 2.0 - 1.0 / ps.cdf(x)) == doctest::Approx(x).epsilon(1e-8));
    }
}

TEST_CASE("verification drivers, one smoke case each") {
    auto free2 = verify_thm_free(kSigma, 2.0);
    REQUIRE(free2.size() == 2);
    CHECK(free2[0].theorem_id == "free-max-semigroup.closed");
    CHECK(free2[1].theorem_id == "free-max-semigroup.grid");
    for (const auto& r : free2) {
        CHECK(r.passed);
        CHECK(r.sup_norm <= r.tolerance);
        CHECK(r.grid.size() == 512);
        CHECK(r.lhs.size() == r.grid.size());
    }
    CHECK(free2[0].sup_norm < 1e-8);

    auto boo2 = verify_thm_boolean(kSigma, 2.0);
    REQUIRE(boo2.size() == 2);
    CHECK(boo2[0].theorem_id == "boolean-max-semigroup.closed");
    for (const auto& r : boo2) CHECK(r.passed);

    auto bn1 = verify_thm_bn(kSigma, 1.0);
    REQUIRE(bn1.size() == 2);
    CHECK(bn1[0].theorem_id == "bn-semigroup.closed");
    for (const auto& r : bn1) CHECK(r.passed);

    auto bns = verify_thm_bn(stable_s_transform(0.5, StableKind::boolean_), 1.0);
    REQUIRE(bns.size() == 1);
    CHECK(bns[0].passed);
    CHECK(bns[0].sup_norm < 1e-8);

    auto cls = verify_thm_classical(1.0, 2.0);
    CHECK(cls.theorem_id == "classical-max-semigroup");
    CHECK(cls.passed);
    CHECK(cls.sup_norm < 1e-10);

    auto mult = verify_mult_identity(kMp1, 2);
    CHECK(mult.theorem_id == "mult-power");
    CHECK(mult.passed);

    CHECK_THROWS_AS(verify_thm_free(kSigma, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(verify_thm_boolean(kSigma, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(verify_thm_classical(0.0, 2.0), std::invalid_argument);
}

TEST_CASE("square of the free poisson has the square-root image") {
    STransform s2 = free_mult_power_s(s_transform(kMp1), 2);
    PhiResult p = phi(s2);
    for (double x : {0.04, 0.25, 0.49, 0.81})
        CHECK(p.cdf(x) == doctest::Approx(std::sqrt(x)).epsilon(1e-6));
}

TEST_CASE("prelimit value maps") {
    CHECK(free_prelimit_value(1.0, 50.0) == doctest::Approx(1.0));
    CHECK(boolean_prelimit_value(1.0, 50.0) == doctest::Approx(1.0));
    // far tail collapses to 0 in the free prelimit
    CHECK(free_prelimit_value(std::exp(-10.0), 2.0) == 0.0);
    // hand evaluation at n = 4, v = e^-2
    const double r = std::exp(-0.5);
    CHECK(free_prelimit_value(std::exp(-2.0), 4.0) ==
          doctest::Approx(std::max(0.0, 4.0 * r - 3.0)).epsilon(1e-13));
    CHECK(boolean_prelimit_value(std::exp(-2.0), 4.0) ==
          doctest::Approx(r / (4.0 - 3.0 * r)).epsilon(1e-13));

    Cdf fr = Cdf::from_law(Law(Frechet{1.0}));
    auto reps = verify_limit_props(fr, {100, 1000, 10000});
    REQUIRE(reps.size() == 8);   // 3 n's + monotone summary, twice
    for (const auto& r2 : reps) CHECK(r2.passed);
    // the monotone summaries record the largest adjacent increase; negative
    // means strictly improving approximation
    CHECK(reps[3].theorem_id == "free-prelimit.monotone");
    CHECK(reps[3].sup_norm <= 0.0);
    CHECK(reps[7].theorem_id == "boolean-prelimit.monotone");
    CHECK(reps[7].sup_norm <= 0.0);
}
