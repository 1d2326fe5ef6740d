// Monte Carlo layer: counter-based RNG, spectra, and the KS statistic.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "freemax/law.hpp"
#include "freemax/randmat.hpp"

#include "oracles.hpp"

using namespace freemax;

TEST_CASE("counter rng determinism and stream separation") {
    Philox4x32 a(42), b(42), c(43), d(42, 1);
    for (int i = 0; i < 1000; ++i) {
        const std::uint32_t va = a.next_u32();
        CHECK(va == b.next_u32());
    }
    // different seed or stream decorrelates immediately
    Philox4x32 a2(42);
    int same_seed = 0, same_stream = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint32_t va = a2.next_u32();
        if (va == c.next_u32()) ++same_seed;
        if (va == d.next_u32()) ++same_stream;
    }
    CHECK(same_seed <= 1);
    CHECK(same_stream <= 1);
}

TEST_CASE("uniform and normal draws look right") {
    Philox4x32 g(7);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = g.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.03));

    double ns = 0.0, ns2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.next_normal();
        ns += z;
        ns2 += z * z;
    }
    CHECK(std::abs(ns / n) < 0.03);
    CHECK(ns2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("wishart spectra") {
    SpectrumSample tiny = sample_wishart_spectrum(2, 9);
    CHECK(tiny.ensemble == "wishart");
    REQUIRE(tiny.eigenvalues.size() == 2);
    CHECK(tiny.eigenvalues[0] >= 0.0);
    CHECK(tiny.eigenvalues[0] <= tiny.eigenvalues[1]);

    SpectrumSample s1 = sample_wishart_spectrum(64, 1234);
    SpectrumSample s2 = sample_wishart_spectrum(64, 1234);
    REQUIRE(s1.eigenvalues.size() == 64);
    for (int i = 0; i < 64; ++i)
        CHECK(s1.eigenvalues[i] == s2.eigenvalues[i]);   // bitwise reproducible
    CHECK(std::is_sorted(s1.eigenvalues.begin(), s1.eigenvalues.end()));

    // trace normalization: mean eigenvalue concentrates at 1
    SpectrumSample s = sample_wishart_spectrum(256, 5);
    double mean = 0.0;
    for (double v : s.eigenvalues) mean += v;
    mean /= 256.0;
    CHECK(std::abs(mean - 1.0) < 3.0 / 16.0);

    // empirical law approaches the quarter-circle-squared shape
    Cdf target([](double x) { return oracles::mp_cdf(1.0, x); }, 0.0, 4.0, "mp");
    CHECK(ks_distance(s, target) < 0.06);
}

TEST_CASE("product spectra") {
    SpectrumSample w = sample_wishart_spectrum(48, 77);
    SpectrumSample p1 = ginibre_product_spectrum(48, 1, 77);
    REQUIRE(p1.eigenvalues.size() == w.eigenvalues.size());
    for (std::size_t i = 0; i < w.eigenvalues.size(); ++i)
        CHECK(p1.eigenvalues[i] ==
              doctest::Approx(w.eigenvalues[i]).epsilon(1e-10));

    SpectrumSample p = ginibre_product_spectrum(96, 16, 3);
    CHECK(p.ensemble == "ginibre-product");
    CHECK(p.n_factors == 16);
    for (double v : p.eigenvalues) CHECK(v >= 0.0);
    CHECK(std::is_sorted(p.eigenvalues.begin(), p.eigenvalues.end()));

    SpectrumSample q = ginibre_product_spectrum(96, 16, 3);
    for (std::size_t i = 0; i < p.eigenvalues.size(); ++i)
        CHECK(p.eigenvalues[i] == q.eigenvalues[i]);
}

TEST_CASE("n-th root spectra drift toward the uniform") {
    Cdf uni([](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }, 0.0, 1.0,
            "uniform");
    const double k2 = averaged_ginibre_ks(128, 2, 11, 2, uni);
    const double k32 = averaged_ginibre_ks(128, 32, 11, 2, uni);
    CHECK(k2 > k32);
    CHECK(k32 < 0.15);
    // the average is itself reproducible
    CHECK(averaged_ginibre_ks(128, 2, 11, 2, uni) == k2);
}

TEST_CASE("ks statistic hand values") {
    Cdf uni([](double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }, 0.0, 1.0,
            "uniform");
    CHECK(ks_distance({0.25, 0.75}, uni) == doctest::Approx(0.25).epsilon(1e-12));

    // placing the sample at centered quantiles leaves only the half-step
    const int n = 40;
    std::vector<double> qs(n);
    for (int i = 0; i < n; ++i) qs[i] = (i + 0.5) / n;
    CHECK(ks_distance(qs, uni) <= 0.5 / n + 1e-12);

    CHECK(ks_distance({0.5}, uni) == doctest::Approx(0.5).epsilon(1e-12));
}
