#include "freemax/measure_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freemax/errors.hpp"

namespace freemax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailCut = 5e-10;   // upper-tail mass dropped when gridding unbounded laws

} // namespace

MomentsAB moments_ab(const Law& law) {
    return std::visit([&](const auto& l) -> MomentsAB {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return {l.location, l.location};         // a = b = location (a = 0 for delta_0)
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return {0.0, 0.5};                       // int 1/x diverges at 0
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            // int x^-1 dMP(t) = 1/(t-1) for t > 1; divergent (or atom) otherwise
            return {l.rate > 1.0 ? l.rate - 1.0 : 0.0, l.rate};
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            const double b = (1.0 - l.mass_at_zero) * l.location;
            return {l.mass_at_zero > 0.0 ? 0.0 : l.location, b};
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return {0.0, l.lambda};                  // atom at 0
        } else if constexpr (std::is_same_v<T, FreeStablePos>) {
            return {1.0, kInf};                      // S-transform image endpoints
        } else if constexpr (std::is_same_v<T, BooleanStablePos>) {
            return {0.0, kInf};
        } else {
            // fall back to the grid representation for the remaining
            // nonnegative laws; negative-support laws are rejected there
            return moments_ab(grid_from_law(Law(l)));
        }
    }, law.variant());
}

MomentsAB moments_ab(const GridMeasure& m) {
    const double inv = m.inv_moment();
    return {std::isfinite(inv) ? 1.0 / inv : 0.0, m.mean()};
}

double cdf_eval(const Law& law, double x) { return law.cdf(x); }
double cdf_eval(const GridMeasure& m, double x) { return m.cdf(x); }
double quantile(const Law& law, double p) { return law.quantile(p); }
double quantile(const GridMeasure& m, double p) { return m.quantile(p); }

Law dilate(const Law& law, double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("dilation factor must be finite and > 0");
    return std::visit([&](const auto& l) -> Law {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return Law(Dirac{l.location * c});
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return Law(TwoPoint{l.mass_at_zero, l.location * c});
        } else {
            throw UnsupportedLawError("dilate: the family '" + Law(l).name() +
                                      "' is not dilation-closed; grid it first");
        }
    }, law.variant());
}

GridMeasure dilate(const GridMeasure& m, double c) { return m.dilated(c); }

GridMeasure power_pushforward(const Law& law, double s, std::size_t n_points) {
    return grid_from_law(law, n_points).power(s);
}

GridMeasure power_pushforward(const GridMeasure& m, double s) { return m.power(s); }

std::vector<double> make_grid(double lo, double hi, std::size_t n_points) {
    if (!(hi > lo) || lo < 0.0 || !std::isfinite(hi))
        throw std::invalid_argument("make_grid: need finite 0 <= lo < hi");
    if (n_points < 8) throw std::invalid_argument("make_grid: too few points");
    std::vector<double> x;
    x.reserve(n_points + 2);
    const double span = hi - lo;
    const std::size_t n_side = n_points / 8;
    if (n_side < 8) {
        // too coarse for grading; plain uniform mesh
        for (std::size_t i = 0; i < n_points; ++i)
            x.push_back(lo + span * static_cast<double>(i) / static_cast<double>(n_points - 1));
        x.back() = hi;
        return x;
    }
    // Convolution bulks routinely end with inverse-square-root density blowups
    // (atom-death boundaries, arcsine-type laws), so cluster nodes geometrically
    // toward *both* endpoints and keep the middle uniform.
    const double g0 = span * 1e-9;
    const double g1 = span * kEdgeFrac;
    const double ratio = std::pow(g1 / g0, 1.0 / static_cast<double>(n_side - 1));
    x.push_back(lo);
    double g = g0;
    for (std::size_t i = 0; i < n_side; ++i, g *= ratio) x.push_back(lo + g);
    std::vector<double> upper;       // offsets below hi, assembled descending
    upper.reserve(n_side + 1);
    upper.push_back(hi);
    g = g0;
    for (std::size_t i = 0; i < n_side; ++i, g *= ratio) upper.push_back(hi - g);
    const std::size_t n_lin = n_points - x.size() - upper.size();
    const double start = x.back();
    const double stop = upper.back();
    for (std::size_t i = 1; i <= n_lin; ++i)
        x.push_back(start + (stop - start) * static_cast<double>(i) /
                                static_cast<double>(n_lin + 1));
    x.insert(x.end(), upper.rbegin(), upper.rend());
    return x;
}

GridMeasure grid_from_law(const Law& law, std::size_t n_points) {
    if (law.is<FreeStablePos>() || law.is<BooleanStablePos>() || law.is<ClassicalStablePos>())
        throw UnsupportedLawError("grid_from_law: '" + law.name() +
                                  "' has no density/atom decomposition; use its S-transform");
    if (law.support().first < 0.0)
        throw UnsupportedLawError("grid_from_law: '" + law.name() +
                                  "' carries mass below 0 and cannot enter the [0,inf) pipeline");

    std::vector<Atom> atoms = law.atoms();
    if (!law.has_density())
        return GridMeasure::from_atoms(std::move(atoms));

    auto [lo, hi] = law.support_hint();
    double mass_defect = 0.0;
    if (!std::isfinite(law.support().second)) {
        hi = law.quantile(1.0 - kTailCut);
        mass_defect = kTailCut;
    }
    std::vector<double> x = make_grid(lo, hi, n_points);
    // atoms inside the range must be nodes
    for (const Atom& a : atoms) {
        if (a.location <= x.front() || a.location >= x.back()) continue;
        const auto it = std::lower_bound(x.begin(), x.end(), a.location);
        if (std::abs(*it - a.location) > 1e-12 * std::max(1.0, a.location))
            x.insert(it, a.location);
    }
    std::vector<double> cdf(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) cdf[i] = law.cdf(x[i]);
    if (mass_defect > 0.0 && !cdf.empty()) cdf.back() = 1.0;   // fold the cut tail into the last cell
    GridMeasure m(std::move(x), std::move(cdf), std::move(atoms));

    std::vector<double> dens(m.grid().size(), 0.0);
    for (std::size_t i = 0; i < m.grid().size(); ++i) dens[i] = law.density(m.grid()[i]);
    m.set_density_values(std::move(dens));
    return m;
}

} // namespace freemax
