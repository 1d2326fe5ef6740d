#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freemax/cdf.hpp"

namespace freemax {

// Counter-based generator (Philox 4x32-10): the stream is pure function of
// (seed, stream, draw index), so results are reproducible across platforms
// and across any threading layout.
class Philox4x32 {
public:
    explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    double next_uniform();   // 53-bit uniform in [0,1)
    double next_normal();    // Box-Muller, second value cached

private:
    void refill();
    std::uint32_t key_[2];
    std::uint32_t ctr_[4];
    std::uint32_t out_[4];
    int idx_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SpectrumSample {
    std::string ensemble;              // "wishart" | "ginibre-product"
    int dim = 0;                       // matrix size N
    int n_factors = 1;                 // product length n
    std::uint64_t seed = 0;
    std::vector<double> eigenvalues;   // ascending; negatives clipped to 0
};

// eigenvalues of X X^T / N, X an NxN matrix of independent standard normals
SpectrumSample sample_wishart_spectrum(int N, std::uint64_t seed);

// eigenvalues of (G_n ... G_1)(G_n ... G_1)^T raised to 1/n, each G a Gaussian
// matrix scaled by 1/sqrt(N).  Long products are accumulated by repeated QR
// with per-row log scales and resolved by a scaled one-sided Jacobi SVD, so
// singular values spanning hundreds of orders of magnitude keep relative
// (log-scale) accuracy.  n == 1 coincides with sample_wishart_spectrum.
SpectrumSample ginibre_product_spectrum(int N, int n, std::uint64_t seed);

// sup_i max(i/N - F(x_i), F(x_i) - (i-1)/N) over the ascending sample
double ks_distance(const std::vector<double>& sorted_sample, const Cdf& target);
double ks_distance(const SpectrumSample& s, const Cdf& target);

// mean KS over reps independent runs seeded seed, seed+1, ...; workers run
// concurrently but results merge by index, so the average is reproducible
double averaged_ginibre_ks(int N, int n, std::uint64_t seed, int reps, const Cdf& target);

} // namespace freemax
