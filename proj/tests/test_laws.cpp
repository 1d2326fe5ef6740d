// Catalog laws, grid representation, and the basic measure operations.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/errors.hpp"
#include "freemax/law.hpp"
#include "freemax/measure_ops.hpp"

#include "oracles.hpp"

using namespace freemax;

TEST_CASE("closed-form cdf values") {
    CHECK(cdf_eval(Law(Dagum{1.0}), 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cdf_eval(Law(Pareto{1.0}), 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(cdf_eval(Law(Dirac{3.0}), 2.0) == 0.0);
    CHECK(cdf_eval(Law(Dirac{3.0}), 3.0) == 1.0);
    CHECK(cdf_eval(Law(MarchenkoPastur{1.0}), 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cdf_eval(Law(MarchenkoPastur{1.0}), -0.5) == 0.0);
    CHECK(cdf_eval(Law(Uniform01{}), 0.25) == doctest::Approx(0.25));
    CHECK(cdf_eval(Law(Frechet{1.0}), 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(cdf_eval(Law(Gumbel{}), 0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(cdf_eval(Law(Weibull{2.0}), -1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(cdf_eval(Law(Weibull{2.0}), 0.0) == doctest::Approx(1.0));
    CHECK(cdf_eval(Law(Exponential{}), 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(cdf_eval(Law(BetaLaw{1.0}), -0.5) == doctest::Approx(0.5));
    // atom at 0 is included from x = 0 on (right continuity)
    CHECK(cdf_eval(Law(TwoPoint{0.5, 2.0}), -0.1) == 0.0);
    CHECK(cdf_eval(Law(TwoPoint{0.5, 2.0}), 0.0) == doctest::Approx(0.5));
    CHECK(cdf_eval(Law(TwoPoint{0.5, 2.0}), 0.3) == doctest::Approx(0.5));
    CHECK(cdf_eval(Law(TwoPoint{0.5, 2.0}), 2.0) == doctest::Approx(1.0));
}

TEST_CASE("marchenko-pastur cdf against quadrature of the closed density") {
    for (double t : {0.5, 1.0, 2.0}) {
        Law mp{MarchenkoPastur{t}};
        const double hi = (1.0 + std::sqrt(t)) * (1.0 + std::sqrt(t));
        for (double f : {0.15, 0.4, 0.75, 0.95}) {
            const double x = f * hi;
            CHECK(cdf_eval(mp, x) == doctest::Approx(oracles::mp_cdf(t, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("quantiles and the generalized-inverse contract") {
    CHECK(quantile(Law(Uniform01{}), 0.25) == doctest::Approx(0.25));
    CHECK(quantile(Law(Dagum{1.0}), 0.5) == doctest::Approx(1.0));
    CHECK(quantile(Law(TwoPoint{0.5, 2.0}), 0.3) == 0.0);
    CHECK(quantile(Law(TwoPoint{0.5, 2.0}), 0.7) == doctest::Approx(2.0));

    // F(q(p)) >= p and q(F(x)) <= x on the continuous families
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    for (const Law& law : {Law(MarchenkoPastur{1.0}), Law(Uniform01{}), Law(Frechet{1.0}),
                           Law(Pareto{2.0}), Law(Dagum{1.5})}) {
        for (int i = 0; i < 40; ++i) {
            const double p = unif(rng);
            const double q = quantile(law, p);
            CHECK(cdf_eval(law, q) >= p - 1e-10);
            CHECK(quantile(law, cdf_eval(law, q)) <= q + 1e-9);
        }
    }
}

TEST_CASE("atom lists") {
    auto tp = Law(TwoPoint{0.5, 2.0}).atoms();
    REQUIRE(tp.size() == 2);
    CHECK(tp[0].location == 0.0);
    CHECK(tp[0].mass == doctest::Approx(0.5));
    CHECK(tp[1].location == doctest::Approx(2.0));
    CHECK(tp[1].mass == doctest::Approx(0.5));

    auto d = Law(Dirac{2.0}).atoms();
    REQUIRE(d.size() == 1);
    CHECK(d[0].location == doctest::Approx(2.0));
    CHECK(d[0].mass == doctest::Approx(1.0));

    // Poisson: P(k) = e^-l l^k / k!, truncated tail folded into the last atom
    auto po = Law(Poisson{1.0}).atoms();
    REQUIRE(po.size() >= 5);
    double total = 0.0;
    for (const auto& a : po) total += a.mass;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(po[0].location == 0.0);
    CHECK(po[0].mass == doctest::Approx(std::exp(-1.0)));
    CHECK(po[2].mass == doctest::Approx(std::exp(-1.0) / 2.0));

    CHECK(Law(MarchenkoPastur{0.5}).atom_at_zero() == doctest::Approx(0.5));
    CHECK(Law(MarchenkoPastur{1.0}).atom_at_zero() == 0.0);
    CHECK(Law(MarchenkoPastur{2.0}).atom_at_zero() == 0.0);
}

TEST_CASE("law grammar parses and round trips") {
    const char* specs[] = {"mp",        "mp:2",       "uniform",     "dirac:1.5",
                           "twopoint:0.5,2", "poisson:1", "fstable:0.5", "bstable:0.5",
                           "cstable:0.5",    "gumbel",    "frechet:1",   "weibull:2",
                           "exponential",    "pareto:1",  "beta:1",      "dagum:1",
                           "mcp:uniform"};
    for (const char* s : specs) {
        Law law = Law::parse(s);
        Law again = Law::parse(law.name());
        // spot check at a few abscissas; stables have no cdf, compare names
        if (law.is<FreeStablePos>() || law.is<BooleanStablePos>() ||
            law.is<ClassicalStablePos>()) {
            CHECK(again.name() == law.name());
            continue;
        }
        for (double x : {0.25, 1.0, 3.0})
            CHECK(again.cdf(x) == doctest::Approx(law.cdf(x)).epsilon(1e-14));
    }

    CHECK_THROWS_AS(Law::parse("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("mp:"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("mp:-1"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("twopoint:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("twopoint:1.5,2"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("frechet:-1"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("dirac:-2"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("poisson:0"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("fstable:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(Law::parse("mcp:"), std::invalid_argument);

    auto cat = Law::catalog();
    CHECK(cat.size() >= 16);
    for (const Law& law : cat) CHECK_NOTHROW(Law::parse(law.name()));
}

TEST_CASE("dilation") {
    Law d = dilate(Law(Dirac{1.0}), 3.0);
    CHECK(d.is<Dirac>());
    CHECK(d.as<Dirac>().location == doctest::Approx(3.0));

    Law tp = dilate(Law(TwoPoint{0.5, 2.0}), 0.5);
    auto atoms = tp.atoms();
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0].location == 0.0);
    CHECK(atoms[1].location == doctest::Approx(1.0));
    CHECK(atoms[1].mass == doctest::Approx(0.5));

    CHECK_THROWS_AS(dilate(Law(MarchenkoPastur{1.0}), 2.0), UnsupportedLawError);
    CHECK_THROWS_AS(dilate(Law(Dirac{1.0}), 0.0), std::invalid_argument);

    GridMeasure u = grid_from_law(Law(Uniform01{}), 512);
    GridMeasure u2 = dilate(u, 2.0);
    CHECK(u2.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(u2.support().second == doctest::Approx(2.0).epsilon(1e-9));

    // D_{1/c} undoes D_c exactly at the nodes
    GridMeasure mp = grid_from_law(Law(MarchenkoPastur{1.0}), 512);
    GridMeasure back = dilate(dilate(mp, 3.0), 1.0 / 3.0);
    REQUIRE(back.grid().size() == mp.grid().size());
    for (std::size_t i = 0; i < mp.grid().size(); ++i) {
        CHECK(back.grid()[i] == doctest::Approx(mp.grid()[i]).epsilon(1e-12));
        CHECK(back.cdf_values()[i] == doctest::Approx(mp.cdf_values()[i]).epsilon(1e-12));
    }
}

TEST_CASE("power pushforward") {
    GridMeasure u2 = power_pushforward(Law(Uniform01{}), 2.0);
    for (double y : {0.09, 0.25, 0.64, 0.81})
        CHECK(u2.cdf(y) == doctest::Approx(std::sqrt(y)).epsilon(1e-6));

    GridMeasure d = power_pushforward(Law(Dirac{4.0}), 0.5);
    REQUIRE(d.atoms().size() == 1);
    CHECK(d.atoms()[0].location == doctest::Approx(2.0));
    CHECK(d.atoms()[0].mass == doctest::Approx(1.0));

    GridMeasure mp = grid_from_law(Law(MarchenkoPastur{1.0}), 1024);
    GridMeasure same = power_pushforward(mp, 1.0);
    for (double x : {0.5, 1.0, 2.5})
        CHECK(same.cdf(x) == doctest::Approx(mp.cdf(x)).epsilon(1e-12));

    GridMeasure round = power_pushforward(power_pushforward(mp, 2.0), 0.5);
    for (double x : {0.5, 1.0, 2.5, 3.5})
        CHECK(round.cdf(x) == doctest::Approx(mp.cdf(x)).epsilon(1e-4));
}

TEST_CASE("endpoint moments a and b") {
    // uniform: the x^-1 integral diverges at 0, the mean is 1/2
    MomentsAB u = moments_ab(Law(Uniform01{}));
    CHECK(u.a == 0.0);
    CHECK(u.b == doctest::Approx(0.5).epsilon(1e-9));

    MomentsAB mp1 = moments_ab(Law(MarchenkoPastur{1.0}));
    CHECK(mp1.a == 0.0);
    CHECK(mp1.b == doctest::Approx(1.0).epsilon(1e-9));

    MomentsAB tp = moments_ab(Law(TwoPoint{0.5, 2.0}));
    CHECK(tp.a == 0.0);   // atom at 0 forces a = 0
    CHECK(tp.b == doctest::Approx(1.0));

    for (double a : {0.7, 2.0}) {
        MomentsAB d = moments_ab(Law(Dirac{a}));
        CHECK(d.a == doctest::Approx(a));
        CHECK(d.b == doctest::Approx(a));
    }

    // rate-2 bulk detaches from 0, so the inverse moment is finite; check both
    // endpoints against direct quadrature of the closed density
    MomentsAB mp2 = moments_ab(Law(MarchenkoPastur{2.0}));
    const double lo = (1.0 - std::sqrt(2.0)) * (1.0 - std::sqrt(2.0));
    const double hi = (1.0 + std::sqrt(2.0)) * (1.0 + std::sqrt(2.0));
    auto dens = [&](double x) {
        const double r = (hi - x) * (x - lo);
        return r > 0.0 ? std::sqrt(r) / (2.0 * M_PI * x) : 0.0;
    };
    const double inv = oracles::integrate([&](double x) { return dens(x) / x; }, lo, hi);
    const double mean = oracles::integrate([&](double x) { return dens(x) * x; }, lo, hi);
    CHECK(mp2.a == doctest::Approx(1.0 / inv).epsilon(1e-6));
    CHECK(mp2.b == doctest::Approx(mean).epsilon(1e-6));

    // grid representation reproduces the closed-form endpoints
    MomentsAB g = moments_ab(grid_from_law(Law(MarchenkoPastur{2.0}), 2048));
    CHECK(g.a == doctest::Approx(mp2.a).epsilon(1e-3));
    CHECK(g.b == doctest::Approx(mp2.b).epsilon(1e-4));
}

TEST_CASE("grid sampling stays close to the closed cdf") {
    for (const Law& law : {Law(MarchenkoPastur{1.0}), Law(Uniform01{}),
                           Law(MarchenkoPastur{0.5}), Law(MarchenkoPastur{2.0})}) {
        const std::size_t n = 1024;
        GridMeasure g = grid_from_law(law, n);
        double sup = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = g.support().first +
                             (g.support().second - g.support().first) * i / 400.0;
            sup = std::max(sup, std::abs(g.cdf(x) - cdf_eval(law, x)));
        }
        CHECK(sup <= 2.0 / static_cast<double>(n));
        CHECK(g.cdf(g.support().second) == doctest::Approx(1.0).epsilon(1e-9));
    }

    GridMeasure u = grid_from_law(Law(Uniform01{}), 256);
    CHECK(u.cdf(0.5) == doctest::Approx(0.5).epsilon(1e-9));

    GridMeasure tp = grid_from_law(Law(TwoPoint{0.5, 2.0}), 64);
    CHECK(!tp.has_continuous_part());
    REQUIRE(tp.atoms().size() == 2);
    CHECK(tp.atoms()[0].mass == doctest::Approx(0.5));

    CHECK_THROWS_AS(grid_from_law(Law(FreeStablePos{0.5})), UnsupportedLawError);
    CHECK_THROWS_AS(grid_from_law(Law(BooleanStablePos{0.5})), UnsupportedLawError);
    CHECK_THROWS_AS(grid_from_law(Law(Gumbel{})), UnsupportedLawError);
}

TEST_CASE("grid measure bookkeeping") {
    GridMeasure mp = grid_from_law(Law(MarchenkoPastur{0.5}), 512);
    CHECK(mp.atom_at_zero() == doctest::Approx(0.5));
    CHECK(mp.continuous_mass() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mp.mean() == doctest::Approx(0.5).epsilon(1e-6));

    // quantile inverts the PL representation exactly
    for (double p : {0.55, 0.7, 0.9, 0.99})
        CHECK(mp.cdf(mp.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    CHECK(mp.quantile(0.3) == 0.0);   // inside the atom

    // inverse moment: uniform diverges (cell touching 0), dirac-at-2 is 1/2
    CHECK(grid_from_law(Law(Uniform01{}), 256).inv_moment() > 1e11);
    GridMeasure d = GridMeasure::from_atoms({{2.0, 1.0}});
    CHECK(d.inv_moment() == doctest::Approx(0.5));
}

TEST_CASE("cdf objects carry law and grid evaluations") {
    Cdf f = Cdf::from_law(Law(Dagum{1.0}));
    CHECK(f(1.0) == doctest::Approx(0.5));
    CHECK(f.quantile(0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.support_lo() == doctest::Approx(0.0));

    GridMeasure mp = grid_from_law(Law(MarchenkoPastur{1.0}), 512);
    Cdf g = Cdf::from_grid(mp);
    for (double x : {0.5, 1.0, 3.0})
        CHECK(g(x) == doctest::Approx(mp.cdf(x)).epsilon(1e-14));
    CHECK(g.quantile(0.5) == doctest::Approx(mp.quantile(0.5)).epsilon(1e-9));

    Cdf h = dilate(f, 2.0);
    CHECK(h(2.0) == doctest::Approx(0.5));
    CHECK(h.quantile(0.5) == doctest::Approx(2.0).epsilon(1e-9));
}
