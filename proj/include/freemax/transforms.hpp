#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "freemax/grid_measure.hpp"
#include "freemax/law.hpp"
#include "freemax/measure_ops.hpp"
#include "freemax/stransform.hpp"

namespace freemax {

using Cpx = std::complex<double>;

struct FE {
    Cpx f;   // reciprocal Cauchy transform, F = 1/G
    Cpx e;   // self-energy, E = z - F
};

// A measure handed over as callable transforms instead of a law or a sampled
// grid.  Used to chain convolution stages without materialising the
// intermediate measure: a piecewise-linear grid stores a staircase density
// whose kinks leak O(drho * log(cell/eps)) artifacts into Re G once the
// Stieltjes offset drops below the cell width, so a second stage reading a
// grid inherits percent-level noise that no extrapolation removes.  Keeping
// the chain analytic (e.g. a subordination-backed Cauchy transform) avoids
// the intermediate representation entirely.
struct TransformSpec {
    std::function<Cpx(Cpx)> cauchy;            // upper half plane
    std::function<double(double)> cauchy_real; // real axis off the support
    std::vector<Atom> atoms;
    std::pair<double, double> support;         // containment hull
    std::optional<std::pair<double, double>> crange;  // continuous-bulk hull
    std::string label;
};

// Uniform front end for the analytic transforms of a measure on [0,inf).
// Laws with closed-form Cauchy/Psi evaluations (dirac, twopoint, uniform, mp,
// poisson) dispatch to those; everything else is sampled onto a grid once and
// evaluated by exact quadrature of the piecewise-linear CDF:
//   G(z)   = sum_i rho_i (Log(z - x_i) - Log(z - x_{i+1})) + atom terms,
//   Psi(u) = sum_i rho_i (-dx_i - (log1p(-u x_{i+1}) - log1p(-u x_i)) / u) + atoms.
// Both are smooth in the spectral parameter, which matters because Stieltjes
// recovery probes imaginary offsets far below the grid spacing.
class AnalyticMeasure {
public:
    explicit AnalyticMeasure(const Law& law, std::size_t grid_points = 2048);
    explicit AnalyticMeasure(GridMeasure m);
    explicit AnalyticMeasure(TransformSpec spec);

    Cpx cauchy(Cpx z) const;            // Im z > 0 (or real z off the support)
    double cauchy_real(double x) const; // real x outside the support
    FE f_and_self_energy(Cpx z) const;
    double f_real(double x) const { return 1.0 / cauchy_real(x); }

    double psi(double u) const;         // u < 0
    double psi_inverse(double z) const; // z in (atom0 - 1, 0)

    double atom_at_zero() const;
    std::vector<Atom> atoms() const;
    MomentsAB moments() const;
    std::pair<double, double> support() const;
    bool purely_atomic() const;

    // continuous-part hull [lo, hi], empty for purely atomic measures
    std::optional<std::pair<double, double>> continuous_range() const;

    const GridMeasure* grid() const { return grid_ ? &*grid_ : nullptr; }
    const Law* closed_law() const { return law_ ? &*law_ : nullptr; }
    // transform-backed measures evaluate their Cauchy transform by an inner
    // iteration, so finite tolerances rule out complex-step differentiation
    bool transform_backed() const { return static_cast<bool>(spec_); }
    std::string label() const;

private:
    struct PsiCache;                    // lazily tabulated Psi for fast inversion
    std::optional<Law> law_;            // engaged only for closed-form laws
    std::optional<GridMeasure> grid_;
    std::optional<TransformSpec> spec_;
    std::vector<Atom> atoms_;           // cached
    std::shared_ptr<PsiCache> psi_cache_;
};

// spec'd entry points ---------------------------------------------------------
Cpx cauchy(const Law& m, Cpx z);
Cpx cauchy(const GridMeasure& m, Cpx z);
FE f_and_self_energy(const Law& m, Cpx z);
FE f_and_self_energy(const GridMeasure& m, Cpx z);
double psi_transform(const Law& m, double u);
double psi_transform(const GridMeasure& m, double u);

STransform s_transform(const Law& m);
STransform s_transform(const GridMeasure& m);
STransform s_transform(const AnalyticMeasure& m);

// Boundary density recovery: d(x) = -Im g(x + i eps)/pi, Richardson-extrapolated
// over the epsilon schedule (default 1e-2 * 2^-k, k = 0..6).  Values in
// [-1e-8, 0) clamp to 0; anything below that (Im g > 0 upstairs) violates the
// Herglotz contract and raises NumericError.
std::vector<double> default_eps_schedule();
// bulk_flag (optional, resized to xs.size()): 1 where the extrapolant is
// consistent with a genuine boundary density, 0 where -Im g is dominated by
// the linear-in-eps smoothing tail of mass living elsewhere (off-support)
std::vector<double> stieltjes_density(const std::function<Cpx(Cpx)>& g,
                                      const std::vector<double>& xs,
                                      const std::vector<double>& eps_schedule = default_eps_schedule(),
                                      std::vector<char>* bulk_flag = nullptr);

struct ConvolutionStats {
    double mass_renorm_defect = 0.0;   // |recovered continuous mass - expected|
    bool renorm_flagged = false;       // defect above 1e-6 (result still usable)
    int max_fixed_point_iters = 0;
    double worst_residual = 0.0;
};

// Free additive convolution power, t >= 1 (t == 1 returns the input
// representation).  Continuous part through subordination: w = z/t +
// (1 - 1/t) F(w), damped fixed point (factor 0.8, tol 1e-12, <= 6000 iters
// with periodic Aitken acceleration); atoms through the survival rule
// mass' = t*mass - (t-1) when positive.
GridMeasure free_add_power(const AnalyticMeasure& m, double t,
                           std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);
GridMeasure free_add_power(const Law& m, double t,
                           std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);
GridMeasure free_add_power(const GridMeasure& m, double t,
                           std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);

// Boolean additive convolution power, t > 0, via F_out = (1-t) z + t F.
// Purely atomic inputs are resolved exactly (interlacing roots of F_out with
// masses 1/F_out'); mixed inputs recover the continuous part by Stieltjes
// inversion and pick up atoms outside the support hull by a real root scan
// with complex-step derivatives for the masses.
GridMeasure boolean_add_power(const AnalyticMeasure& m, double t,
                              std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);
GridMeasure boolean_add_power(const Law& m, double t,
                              std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);
GridMeasure boolean_add_power(const GridMeasure& m, double t,
                              std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);

// The composite operator B_t = boolean power 1/(1+t) of the free power 1+t,
// t >= 0.  The free stage stays symbolic -- a subordination-backed Cauchy
// transform wrapped in a TransformSpec -- so the boolean stage probes the true
// analytic transform instead of a resampled grid.  Chaining the two power
// functions by hand materialises the free stage as a piecewise-linear measure
// and loses 2-3 digits to its staircase density; this path keeps the full
// closed-form accuracy of the base law.
GridMeasure b_t_operator(const Law& mu, double t,
                         std::size_t n_points = 2048, ConvolutionStats* stats = nullptr);

} // namespace freemax
