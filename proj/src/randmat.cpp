#include "freemax/randmat.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "freemax/errors.hpp"

namespace freemax {

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<std::uint32_t>(stream);
    ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
}

void Philox4x32::refill() {
    std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = 0xD2511F53ull * c0;
        const std::uint64_t p1 = 0xCD9E8D57ull * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    idx_ = 0;
    if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
}

std::uint32_t Philox4x32::next_u32() {
    if (idx_ == 4) refill();
    return out_[idx_++];
}

double Philox4x32::next_uniform() {
    const std::uint64_t a = next_u32();
    const std::uint64_t b = next_u32();
    return static_cast<double>(((a << 32) | b) >> 11) * 0x1.0p-53;
}

double Philox4x32::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - next_uniform();   // (0,1]: keeps log finite
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {

// distinct RNG streams per ensemble so wishart(seed) and ginibre(seed) do not
// share draws
constexpr std::uint64_t kWishartStream = 0x57495348ull;
constexpr std::uint64_t kGinibreStream = 0x47494E42ull;

void fill_normals(Philox4x32& rng, Eigen::MatrixXd& m, double scale) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = scale * rng.next_normal();
}

std::vector<double> clip_sorted(Eigen::VectorXd evs) {
    std::vector<double> out(evs.data(), evs.data() + evs.size());
    std::sort(out.begin(), out.end());
    const double floor = -1e-10 * std::max(1.0, std::abs(out.back()));
    for (double& v : out) {
        if (v < floor) throw NumericError("spectrum has a significantly negative eigenvalue");
        if (v < 0.0) v = 0.0;
    }
    return out;
}

// T <- R * T for upper-triangular R, with T held as diag(exp(ell)) * That and
// every That row scaled to unit max-abs.  In-place ascending over rows is safe
// because row i only reads rows j >= i.
void scaled_triangular_update(Eigen::MatrixXd& That, std::vector<double>& ell,
                              const Eigen::MatrixXd& R) {
    const Eigen::Index N = That.rows();
    Eigen::RowVectorXd row(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = i; j < N; ++j)
            if (R(i, j) != 0.0) m = std::max(m, ell[static_cast<std::size_t>(j)]);
        if (!std::isfinite(m))
            throw NumericError("ginibre product: zero row in triangular accumulation");
        row.setZero();
        for (Eigen::Index j = i; j < N; ++j) {
            const double w = R(i, j) * std::exp(ell[static_cast<std::size_t>(j)] - m);
            if (w != 0.0) row += w * That.row(j);
        }
        const double s = row.cwiseAbs().maxCoeff();
        if (!(s > 0.0)) throw NumericError("ginibre product: vanishing row scale");
        That.row(i) = row / s;
        ell[static_cast<std::size_t>(i)] = m + std::log(s);
    }
}

// One-sided Jacobi on unit columns with separate log norms.  Pairs whose log
// norms differ hugely degenerate into a Gram-Schmidt step that orthogonalizes
// the small column against the large one; this keeps every rotation finite
// while preserving relative accuracy of each log singular value.
void scaled_jacobi_svd(Eigen::MatrixXd& B, std::vector<double>& g) {
    const Eigen::Index N = B.cols();
    constexpr double kOrthTol = 1e-13;
    constexpr double kDeltaAsym = 34.0;   // exp(-2*34) is far below epsilon
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            for (Eigen::Index j = i + 1; j < N; ++j) {
                const double gamma = B.col(i).dot(B.col(j));
                off = std::max(off, std::abs(gamma));
                if (std::abs(gamma) < 1e-15) continue;
                const double delta = g[static_cast<std::size_t>(j)] -
                                     g[static_cast<std::size_t>(i)];
                if (delta > kDeltaAsym || delta < -kDeltaAsym) {
                    const Eigen::Index small = delta > 0.0 ? i : j;
                    const Eigen::Index big = delta > 0.0 ? j : i;
                    Eigen::VectorXd u = B.col(small) - gamma * B.col(big);
                    const double nu = u.norm();
                    if (!(nu > 0.0))
                        throw NumericError("ginibre product: singular-vector collapse");
                    B.col(small) = u / nu;
                    g[static_cast<std::size_t>(small)] += std::log(nu);
                    continue;
                }
                const double zeta = std::sinh(delta) / gamma;
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const Eigen::VectorXd u =
                    c * B.col(i) - (s * std::exp(delta)) * B.col(j);
                const Eigen::VectorXd v =
                    (s * std::exp(-delta)) * B.col(i) + c * B.col(j);
                const double nu = u.norm();
                const double nv = v.norm();
                if (!(nu > 0.0) || !(nv > 0.0))
                    throw NumericError("ginibre product: jacobi rotation collapse");
                B.col(i) = u / nu;
                g[static_cast<std::size_t>(i)] += std::log(nu);
                B.col(j) = v / nv;
                g[static_cast<std::size_t>(j)] += std::log(nv);
            }
        }
        if (off < kOrthTol) return;
    }
    // a full sweep budget without meeting the tolerance still leaves the log
    // norms accurate to far better than the Monte Carlo resolution; proceed
}

} // namespace

SpectrumSample sample_wishart_spectrum(int N, std::uint64_t seed) {
    if (N < 2) throw std::invalid_argument("sample_wishart_spectrum: N must be >= 2");
    Philox4x32 rng(seed, kWishartStream);
    Eigen::MatrixXd X(N, N);
    fill_normals(rng, X, 1.0);
    const Eigen::MatrixXd W = (X * X.transpose()) / static_cast<double>(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("sample_wishart_spectrum: eigensolver failed");
    SpectrumSample out;
    out.ensemble = "wishart";
    out.dim = N;
    out.n_factors = 1;
    out.seed = seed;
    out.eigenvalues = clip_sorted(es.eigenvalues());
    return out;
}

SpectrumSample ginibre_product_spectrum(int N, int n, std::uint64_t seed) {
    if (N < 2) throw std::invalid_argument("ginibre_product_spectrum: N must be >= 2");
    if (n < 1) throw std::invalid_argument("ginibre_product_spectrum: n must be >= 1");
    if (n == 1) {
        SpectrumSample out = sample_wishart_spectrum(N, seed);
        out.ensemble = "ginibre-product";
        return out;
    }

    Philox4x32 rng(seed, kGinibreStream);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    Eigen::MatrixXd That = Eigen::MatrixXd::Identity(N, N);
    std::vector<double> ell(static_cast<std::size_t>(N), 0.0);
    Eigen::MatrixXd Q;
    Eigen::MatrixXd G(N, N);
    for (int k = 0; k < n; ++k) {
        fill_normals(rng, G, scale);
        const Eigen::MatrixXd A = k == 0 ? G : Eigen::MatrixXd(G * Q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        Q = qr.householderQ();
        const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
        scaled_triangular_update(That, ell, R);
    }

    // singular values of diag(exp(ell)) * That: columns of the transpose carry
    // one row each
    Eigen::MatrixXd B = That.transpose();
    std::vector<double> g(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) {
        const double nrm = B.col(i).norm();
        if (!(nrm > 0.0)) throw NumericError("ginibre product: zero row");
        B.col(i) /= nrm;
        g[static_cast<std::size_t>(i)] = ell[static_cast<std::size_t>(i)] + std::log(nrm);
    }
    scaled_jacobi_svd(B, g);

    SpectrumSample out;
    out.ensemble = "ginibre-product";
    out.dim = N;
    out.n_factors = n;
    out.seed = seed;
    out.eigenvalues.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out.eigenvalues[i] = std::exp(2.0 * g[i] / static_cast<double>(n));
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

double ks_distance(const std::vector<double>& sorted_sample, const Cdf& target) {
    if (sorted_sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
    const double n = static_cast<double>(sorted_sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
        if (i > 0 && sorted_sample[i] < sorted_sample[i - 1])
            throw std::invalid_argument("ks_distance: sample not sorted");
        const double F = target(sorted_sample[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - F,
                                 F - static_cast<double>(i) / n));
    }
    return d;
}

double ks_distance(const SpectrumSample& s, const Cdf& target) {
    return ks_distance(s.eigenvalues, target);
}

double averaged_ginibre_ks(int N, int n, std::uint64_t seed, int reps, const Cdf& target) {
    if (reps < 1) throw std::invalid_argument("averaged_ginibre_ks: reps must be >= 1");
    std::vector<std::future<double>> futs;
    futs.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        futs.push_back(std::async(std::launch::async, [=, &target] {
            return ks_distance(ginibre_product_spectrum(N, n, seed + static_cast<std::uint64_t>(i)),
                               target);
        }));
    }
    double sum = 0.0;
    for (auto& f : futs) sum += f.get();
    return sum / static_cast<double>(reps);
}

} // namespace freemax
