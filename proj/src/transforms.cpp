#include "freemax/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>

#include "freemax/errors.hpp"
#include "freemax/parallel.hpp"
#include "freemax/phi.hpp"
#include "freemax/rootfind.hpp"

namespace freemax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool closed_transform_law(const Law& law) {
    return law.is<Dirac>() || law.is<TwoPoint>() || law.is<Uniform01>() ||
           law.is<MarchenkoPastur>() || law.is<Poisson>();
}

// --- closed-form Cauchy transforms -------------------------------------------

Cpx mp_cauchy(double t, Cpx z) {
    const double s = std::sqrt(t);
    const double lo = (1.0 - s) * (1.0 - s), hi = (1.0 + s) * (1.0 + s);
    // branch with G ~ 1/z at infinity: principal square roots of both factors
    const Cpx root = std::sqrt(z - lo) * std::sqrt(z - hi);
    return (z + 1.0 - t - root) / (2.0 * z);
}

double mp_cauchy_real(double t, double x) {
    const double s = std::sqrt(t);
    const double lo = (1.0 - s) * (1.0 - s), hi = (1.0 + s) * (1.0 + s);
    const double disc = (x - 1.0 - t) * (x - 1.0 - t) - 4.0 * t;
    if (x > hi) return (x + 1.0 - t - std::sqrt(disc)) / (2.0 * x);
    if (x < lo && x != 0.0) return (x + 1.0 - t + std::sqrt(disc)) / (2.0 * x);
    throw std::domain_error("mp_cauchy_real: x inside the bulk");
}

template <class Z>
Z atom_cauchy(const std::vector<Atom>& atoms, Z z) {
    Z g{};
    for (const Atom& a : atoms) g += a.mass / (z - a.location);
    return g;
}

Cpx grid_cauchy(const GridMeasure& m, Cpx z) {
    Cpx g = atom_cauchy(m.atoms(), z);
    const auto& x = m.grid();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double mass = m.cell_mass(i);
        if (mass <= 0.0) continue;
        const double rho = mass / (x[i + 1] - x[i]);
        g += rho * (std::log(z - x[i]) - std::log(z - x[i + 1]));
    }
    return g;
}

double grid_cauchy_real(const GridMeasure& m, double x0) {
    double g = atom_cauchy(m.atoms(), x0);
    const auto& x = m.grid();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double mass = m.cell_mass(i);
        if (mass <= 0.0) continue;
        const double num = x0 - x[i], den = x0 - x[i + 1];
        if (num * den <= 0.0)
            throw std::domain_error("cauchy_real: point inside the continuous support");
        g += mass / (x[i + 1] - x[i]) * std::log(num / den);
    }
    return g;
}

double grid_psi(const GridMeasure& m, double u) {
    double p = 0.0;
    for (const Atom& a : m.atoms())
        p += a.mass * u * a.location / (1.0 - u * a.location);
    const auto& x = m.grid();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double mass = m.cell_mass(i);
        if (mass <= 0.0) continue;
        const double rho = mass / (x[i + 1] - x[i]);
        p += rho * (-(x[i + 1] - x[i]) -
                    (std::log1p(-u * x[i + 1]) - std::log1p(-u * x[i])) / u);
    }
    return p;
}

double poisson_psi(const std::vector<Atom>& atoms, double u) {
    double p = 0.0;
    for (const Atom& a : atoms)
        p += a.mass * u * a.location / (1.0 - u * a.location);
    return p;
}

void insert_nodes(std::vector<double>& xs, const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms) {
        if (a.location <= xs.front() || a.location >= xs.back()) continue;
        const auto it = std::lower_bound(xs.begin(), xs.end(), a.location);
        if (std::abs(*it - a.location) > 1e-12 * std::max(1.0, a.location))
            xs.insert(it, a.location);
    }
}

} // namespace

// --- AnalyticMeasure ---------------------------------------------------------

struct AnalyticMeasure::PsiCache {
    std::mutex mu;
    bool built = false;
    std::vector<double> u, psi;   // both increasing in index (u from -1e12 to -1e-12)
};

AnalyticMeasure::AnalyticMeasure(const Law& law, std::size_t grid_points)
    : psi_cache_(std::make_shared<PsiCache>()) {
    if (closed_transform_law(law)) {
        law_ = law;
        atoms_ = law.atoms();
    } else {
        grid_ = grid_from_law(law, grid_points);
        atoms_ = grid_->atoms();
    }
}

AnalyticMeasure::AnalyticMeasure(GridMeasure m)
    : grid_(std::move(m)), psi_cache_(std::make_shared<PsiCache>()) {
    atoms_ = grid_->atoms();
}

AnalyticMeasure::AnalyticMeasure(TransformSpec spec)
    : spec_(std::move(spec)), psi_cache_(std::make_shared<PsiCache>()) {
    if (!spec_->cauchy || !spec_->cauchy_real)
        throw std::invalid_argument("AnalyticMeasure: transform spec needs both cauchy callables");
    atoms_ = spec_->atoms;
}

Cpx AnalyticMeasure::cauchy(Cpx z) const {
    if (spec_) return spec_->cauchy(z);
    if (grid_) return grid_cauchy(*grid_, z);
    return std::visit([&](const auto& l) -> Cpx {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return 1.0 / (z - l.location);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return l.mass_at_zero / z + (1.0 - l.mass_at_zero) / (z - l.location);
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return std::log(z) - std::log(z - 1.0);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            return mp_cauchy(l.rate, z);
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return atom_cauchy(atoms_, z);
        } else {
            throw std::logic_error("unreachable: non-closed law in AnalyticMeasure");
        }
    }, law_->variant());
}

double AnalyticMeasure::cauchy_real(double x) const {
    if (spec_) return spec_->cauchy_real(x);
    if (grid_) return grid_cauchy_real(*grid_, x);
    return std::visit([&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return 1.0 / (x - l.location);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return l.mass_at_zero / x + (1.0 - l.mass_at_zero) / (x - l.location);
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            if (x > 0.0 && x < 1.0) throw std::domain_error("cauchy_real: inside support");
            return std::log(x / (x - 1.0));
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            return mp_cauchy_real(l.rate, x);
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return atom_cauchy(atoms_, x);
        } else {
            throw std::logic_error("unreachable");
        }
    }, law_->variant());
}

FE AnalyticMeasure::f_and_self_energy(Cpx z) const {
    const Cpx f = 1.0 / cauchy(z);
    return {f, z - f};
}

double AnalyticMeasure::psi(double u) const {
    if (!(u < 0.0)) throw std::domain_error("psi: needs u < 0");
    if (spec_) return spec_->cauchy_real(1.0 / u) / u - 1.0;  // Psi(u) = G(1/u)/u - 1
    if (grid_) return grid_psi(*grid_, u);
    return std::visit([&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return u * l.location / (1.0 - u * l.location);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return (1.0 - l.mass_at_zero) * u * l.location / (1.0 - u * l.location);
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return -1.0 - std::log1p(-u) / u;
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            // Psi(u) = G(1/u)/u - 1 evaluated on the real branch below 0
            const double z = 1.0 / u;
            return mp_cauchy_real(l.rate, z) / u - 1.0;
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return poisson_psi(atoms_, u);
        } else {
            throw std::logic_error("unreachable");
        }
    }, law_->variant());
}

double AnalyticMeasure::psi_inverse(double z) const {
    const double lo = atom_at_zero() - 1.0;
    if (!(z > lo) || !(z < 0.0))
        throw std::domain_error("psi_inverse: target outside (atom0 - 1, 0)");

    if (grid_) {
        // build the log-spaced table once; later calls bracket in it and
        // polish with exact evaluations
        {
            std::lock_guard<std::mutex> lock(psi_cache_->mu);
            if (!psi_cache_->built) {
                const std::size_t n = 2048;
                psi_cache_->u.resize(n);
                psi_cache_->psi.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double e = 12.0 - 24.0 * static_cast<double>(i) / (n - 1);
                    psi_cache_->u[i] = -std::pow(10.0, e);
                }
                for (std::size_t i = 0; i < n; ++i)
                    psi_cache_->psi[i] = psi(psi_cache_->u[i]);
                psi_cache_->built = true;
            }
        }
        const auto& tab = *psi_cache_;
        if (z > tab.psi.front() && z < tab.psi.back()) {
            const auto it = std::lower_bound(tab.psi.begin(), tab.psi.end(), z);
            const std::size_t j = static_cast<std::size_t>(it - tab.psi.begin());
            if (j > 0 && j < tab.psi.size()) {
                return brent([this, z](double u) { return psi(u) - z; },
                             tab.u[j - 1], tab.u[j], tab.psi[j - 1] - z, tab.psi[j] - z,
                             {1e-14, 0.0, 200});
            }
        }
    }
    return solve_monotone([this](double u) { return psi(u); }, z, -kInf, 0.0,
                          -2.0, -0.25, {1e-14, 0.0, 300});
}

double AnalyticMeasure::atom_at_zero() const {
    for (const Atom& a : atoms_)
        if (a.location == 0.0) return a.mass;
    return 0.0;
}

std::vector<Atom> AnalyticMeasure::atoms() const { return atoms_; }

MomentsAB AnalyticMeasure::moments() const {
    if (spec_) throw std::logic_error("moments unavailable for a transform-backed measure");
    return grid_ ? moments_ab(*grid_) : moments_ab(*law_);
}

std::pair<double, double> AnalyticMeasure::support() const {
    if (spec_) return spec_->support;
    return grid_ ? grid_->support() : law_->support_hint();
}

bool AnalyticMeasure::purely_atomic() const {
    if (spec_) {
        double m = 0.0;
        for (const Atom& a : atoms_) m += a.mass;
        return m >= 1.0 - 1e-12;
    }
    return grid_ ? !grid_->has_continuous_part() : !law_->has_density();
}

std::optional<std::pair<double, double>> AnalyticMeasure::continuous_range() const {
    if (purely_atomic()) return std::nullopt;
    if (spec_) return spec_->crange;
    if (grid_) {
        const auto& x = grid_->grid();
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            if (grid_->cell_mass(i) > 0.0) {
                lo = std::min(lo, x[i]);
                hi = std::max(hi, x[i + 1]);
            }
        }
        return std::make_pair(lo, hi);
    }
    if (law_->is<Uniform01>()) return std::make_pair(0.0, 1.0);
    if (law_->is<MarchenkoPastur>()) {
        const double t = law_->as<MarchenkoPastur>().rate;
        const double s = std::sqrt(t);
        return std::make_pair((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s));
    }
    return std::nullopt;
}

std::string AnalyticMeasure::label() const {
    if (spec_) return spec_->label.empty() ? "transform" : spec_->label;
    return law_ ? law_->name() : "grid";
}

// --- spec'd thin wrappers ----------------------------------------------------

Cpx cauchy(const Law& m, Cpx z) { return AnalyticMeasure(m).cauchy(z); }
Cpx cauchy(const GridMeasure& m, Cpx z) { return grid_cauchy(m, z); }
FE f_and_self_energy(const Law& m, Cpx z) { return AnalyticMeasure(m).f_and_self_energy(z); }
FE f_and_self_energy(const GridMeasure& m, Cpx z) {
    const Cpx f = 1.0 / grid_cauchy(m, z);
    return {f, z - f};
}
double psi_transform(const Law& m, double u) { return AnalyticMeasure(m).psi(u); }
double psi_transform(const GridMeasure& m, double u) {
    if (!(u < 0.0)) throw std::domain_error("psi: needs u < 0");
    return grid_psi(m, u);
}

// --- S-transforms ------------------------------------------------------------

namespace {

STransform s_from_analytic(std::shared_ptr<const AnalyticMeasure> am) {
    const MomentsAB mom = am->moments();
    const double a0 = am->atom_at_zero();
    return STransform(
        [am](double z) { return (1.0 + z) / z * am->psi_inverse(z); },
        a0, mom.a, mom.b, STransform::Provenance::grid_numeric, am->label());
}

} // namespace

STransform s_transform(const Law& m) {
    if (m.is<FreeStablePos>())
        return stable_s_transform(m.as<FreeStablePos>().alpha, StableKind::free);
    if (m.is<BooleanStablePos>())
        return stable_s_transform(m.as<BooleanStablePos>().alpha, StableKind::boolean_);
    if (m.is<ClassicalStablePos>())
        throw UnsupportedLawError("the classical stable tag has no S-transform; "
                                  "it only feeds chi_inverse_catalog/psi_op");
    if (m.is<Dirac>()) {
        const double a = m.as<Dirac>().location;
        return STransform::constant(a > 0.0 ? 1.0 / a : kInf, a, m.name());
    }
    if (m.is<TwoPoint>()) {
        const auto& tp = m.as<TwoPoint>();
        const double p = tp.mass_at_zero, loc = tp.location;
        if (p == 0.0) return STransform::constant(1.0 / loc, loc, m.name());
        if (p == 1.0) return STransform::constant(kInf, 0.0, m.name());
        return STransform([p, loc](double z) { return (z + 1.0) / (loc * (z + 1.0 - p)); },
                          p, 0.0, (1.0 - p) * loc, STransform::Provenance::closed_form, m.name());
    }
    if (m.is<MarchenkoPastur>()) {
        const double t = m.as<MarchenkoPastur>().rate;
        return STransform([t](double z) { return 1.0 / (t + z); },
                          std::max(1.0 - t, 0.0), t > 1.0 ? t - 1.0 : 0.0, t,
                          STransform::Provenance::closed_form, m.name());
    }
    if (m.is<Uniform01>() || m.is<Poisson>()) {
        // Psi is closed form; S needs only the scalar inversion
        auto am = std::make_shared<const AnalyticMeasure>(m);
        const MomentsAB mom = moments_ab(m);
        return STransform(
            [am](double z) { return (1.0 + z) / z * am->psi_inverse(z); },
            am->atom_at_zero(), mom.a, mom.b, STransform::Provenance::closed_form, m.name());
    }
    return s_from_analytic(std::make_shared<const AnalyticMeasure>(m));
}

STransform s_transform(const GridMeasure& m) {
    return s_from_analytic(std::make_shared<const AnalyticMeasure>(m));
}

STransform s_transform(const AnalyticMeasure& m) {
    if (const Law* law = m.closed_law()) return s_transform(*law);
    return s_from_analytic(std::make_shared<const AnalyticMeasure>(m));
}

// --- Stieltjes inversion -----------------------------------------------------

std::vector<double> default_eps_schedule() {
    std::vector<double> eps;
    for (int k = 0; k <= 6; ++k) eps.push_back(1e-2 * std::pow(2.0, -k));
    return eps;
}

std::vector<double> stieltjes_density(const std::function<Cpx(Cpx)>& g,
                                      const std::vector<double>& xs,
                                      const std::vector<double>& eps_schedule,
                                      std::vector<char>* bulk_flag) {
    if (eps_schedule.size() < 2)
        throw std::invalid_argument("stieltjes_density: need at least two epsilon levels");
    // The Herglotz validity tripwire lives on the raw samples, where it
    // belongs: -Im G/pi at a finite offset is nonnegative for every measure,
    // up to benign noise (atom-pole cancellation residues, inner-solver
    // tolerances of iterative transforms), while genuine violations -- wrong
    // branch, decreasing CDF, negative masses -- show up at 1e-2 and above.
    // The extrapolant below is a numerical artifact with no sign guarantee
    // near bulk edges (outside an edge at distance delta, v = a*eps -
    // c*eps^3/delta^(5/2) + ..., so the step swings ~ -sqrt(eps) as delta
    // approaches eps) and clamps freely.
    constexpr double kNegTol = 1e-4;
    std::vector<double> out(xs.size(), 0.0);
    if (bulk_flag) bulk_flag->assign(xs.size(), 0);
    parallel_for(xs.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double x = xs[i];
            std::vector<double> v(eps_schedule.size());
            for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
                const Cpx gz = g(Cpx(x, eps_schedule[k]));
                v[k] = -gz.imag() / M_PI;
                if (v[k] < -kNegTol) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "stieltjes_density: boundary values are not a positive density "
                                  "(-Im G/pi = %.3g at x = %.6g, eps = %.3g)",
                                  v[k], x, eps_schedule[k]);
                    throw NumericError(buf);
                }
            }
            // Richardson step on the smallest offsets.  The quadratic variant
            // kills both the linear-in-eps tail of off-support mass and the
            // eps^2 smoothing bias, which otherwise tilts the measured edge
            // exponents (a u^-1/2 edge smooths to rho (1 - 3/8 (eps/u)^2)).
            const std::size_t n = v.size();
            double d = n >= 3 ? (8.0 * v[n - 1] - 6.0 * v[n - 2] + v[n - 3]) / 3.0
                              : 2.0 * v[n - 1] - v[n - 2];
            // off the support -Im g is ~ linear in eps, which the step cancels;
            // a surviving extrapolant marks genuine boundary density
            if (bulk_flag) (*bulk_flag)[i] = d > 0.05 * v[n - 1] ? 1 : 0;
            out[i] = std::max(d, 0.0);
        }
    });
    return out;
}

// --- free additive power -----------------------------------------------------

namespace {

struct FixedPointTracker {
    std::mutex mu;
    int max_iters = 0;
    double worst_residual = 0.0;
    void record(int iters, double res) {
        std::lock_guard<std::mutex> lock(mu);
        max_iters = std::max(max_iters, iters);
        worst_residual = std::max(worst_residual, res);
    }
};

// subordination fixed point for the free power: w = z/t + (1 - 1/t) F(w)
Cpx subordinate(const AnalyticMeasure& m, double t, Cpx z, FixedPointTracker* trk) {
    constexpr double kDamp = 0.8;
    constexpr double kTol = 1e-12;
    constexpr double kAccept = 1e-8;   // last resort when the budget runs out
    constexpr int kMaxIter = 6000;
    auto step = [&](Cpx w) {
        return (1.0 - kDamp) * w + kDamp * (z / t + (1.0 - 1.0 / t) / m.cauchy(w));
    };
    auto resid = [](Cpx a, Cpx b) { return std::abs(b - a) / std::max(1.0, std::abs(b)); };

    Cpx w2 = z;
    Cpx w1 = step(w2);
    Cpx w = step(w1);
    double res = resid(w1, w);
    int it = 2;
    for (; it <= kMaxIter && res > kTol; ++it) {
        // The damped map converges linearly with rate -> 1 near bulk edges;
        // periodic Aitken extrapolation removes that geometric tail.  Only
        // accept an extrapolant that stays in the upper half plane and
        // actually shrinks the residual.
        if (it % 6 == 0) {
            const Cpx d1 = w - w1;
            const Cpx den = d1 - (w1 - w2);
            if (std::abs(den) > 0.0) {
                const Cpx cand = w - d1 * d1 / den;
                // real z keeps the whole orbit on the real axis, where a
                // boundary (imag == 0) extrapolant is legitimate
                const bool in_domain = cand.imag() > 0.0 ||
                                       (z.imag() == 0.0 && cand.imag() == 0.0);
                if (std::isfinite(cand.real()) && std::isfinite(cand.imag()) &&
                    in_domain) {
                    const Cpx nc = step(cand);
                    const double rc = resid(cand, nc);
                    if (rc < res) {
                        w2 = w1;
                        w1 = cand;
                        w = nc;
                        res = rc;
                        continue;
                    }
                }
            }
        }
        const Cpx next = step(w);
        res = resid(w, next);
        w2 = w1;
        w1 = w;
        w = next;
    }
    if (res <= kAccept) {
        if (trk) trk->record(it, res);
        return w;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "subordination stagnated at z = %.6g + %.3gi (residual %.3g)",
                  z.real(), z.imag(), res);
    throw NumericError(buf);
}

std::vector<Atom> surviving_atoms_free(const std::vector<Atom>& atoms, double t) {
    std::vector<Atom> out;
    for (const Atom& a : atoms)
        if (a.mass > 1.0 - 1.0 / t)
            out.push_back({t * a.location, t * a.mass - (t - 1.0)});
    return out;
}

// Trapezoid masses misprice the graded edge blocks: bulk edges routinely carry
// rho ~ c u^g with g = -1/2 (atom-death boundaries, arcsine-type laws), where a
// trapezoid loses O(sqrt(cell)) mass and the eps-smoothed samples below
// u ~ 10 * eps_min are biased low.  Each cell inside a block instead integrates
// the power law pinned by its endpoint samples; the cells hidden by the
// smoothing radius reuse the exponent measured on the first clean stretch.
void refine_edge_cells(const std::vector<double>& xs, const std::vector<double>& dens,
                       std::vector<double>& cells, double safe_u) {
    const std::size_t n = xs.size();
    if (n < 24) return;
    const double span = xs.back() - xs.front();
    const double block = kEdgeFrac * span;
    double dmax = 0.0;
    for (double d : dens) dmax = std::max(dmax, d);
    if (!(dmax > 0.0) || !(safe_u < block)) return;
    const double floor = 1e-9 * dmax;

    // integral of rho_ref * (u / u_ref)^g over [u0, u1]
    auto power_mass = [](double rho_ref, double u_ref, double g, double u0, double u1) {
        return rho_ref / ((g + 1.0) * std::pow(u_ref, g)) *
               (std::pow(u1, g + 1.0) - std::pow(u0, g + 1.0));
    };

    for (int side = 0; side < 2; ++side) {
        const bool up = side == 1;
        // ordinal k counts nodes from the edge inward
        auto node = [&](std::size_t k) { return up ? n - 1 - k : k; };
        auto u_of = [&](std::size_t k) {
            return up ? xs.back() - xs[n - 1 - k] : xs[k] - xs.front();
        };
        auto cell_at = [&](std::size_t k) { return up ? n - 2 - k : k; };

        std::size_t ka = 0;   // first node outside the smoothing radius
        while (ka + 1 < n && u_of(ka) < safe_u) ++ka;
        if (ka + 1 >= n || u_of(ka) > block) continue;
        const double u_a = u_of(ka);
        const double rho_a = dens[node(ka)];

        double g_hat = std::numeric_limits<double>::quiet_NaN();
        if (rho_a > floor) {
            std::size_t kb = ka + 1;
            while (kb + 1 < n && u_of(kb) < 4.0 * u_a) ++kb;
            const double u_b = u_of(kb), rho_b = dens[node(kb)];
            if (u_b <= block && u_b > u_a && rho_b > floor) {
                const double g = std::log(rho_b / rho_a) / std::log(u_b / u_a);
                if (std::isfinite(g) && g > -0.95 && g < 6.0) g_hat = g;
            }
        }
        if (std::isfinite(g_hat))
            for (std::size_t k = 0; k < ka; ++k)
                cells[cell_at(k)] = power_mass(rho_a, u_a, g_hat, u_of(k), u_of(k + 1));

        for (std::size_t k = ka; k + 1 < n && u_of(k + 1) <= block; ++k) {
            const double u0 = u_of(k), u1 = u_of(k + 1);
            const double r0 = dens[node(k)], r1 = dens[node(k + 1)];
            if (!(r0 > floor) || !(r1 > floor) || !(u1 > u0 * (1.0 + 1e-12))) continue;
            const double g = std::log(r1 / r0) / std::log(u1 / u0);
            if (!std::isfinite(g) || g <= -0.95 || g >= 6.0) continue;
            cells[cell_at(k)] = power_mass(r0, u0, g, u0, u1);
        }
    }
}

GridMeasure continuous_from_density(std::vector<double> xs, const std::vector<double>& dens,
                                    const std::vector<char>& bulk, std::vector<Atom> out_atoms,
                                    ConvolutionStats* stats, double safe_u) {
    std::vector<double> cells(xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        cells[i] = 0.5 * (dens[i] + dens[i + 1]) * (xs[i + 1] - xs[i]);
    refine_edge_cells(xs, dens, cells, safe_u);

    // drop the smoothing residue outside the outermost genuine-bulk nodes so
    // support queries (and any second convolution stage) see sharp edges; the
    // transition cells next to the first/last bulk node stay as computed
    std::vector<double> dens_out = dens;
    std::size_t fb = 0;
    while (fb < bulk.size() && !bulk[fb]) ++fb;
    std::size_t lb = bulk.size();
    while (lb > 0 && !bulk[lb - 1]) --lb;
    if (fb < lb) {
        for (std::size_t i = 0; i + 1 < fb; ++i) cells[i] = 0.0;
        for (std::size_t i = 0; i < fb; ++i) dens_out[i] = 0.0;
        for (std::size_t i = lb; i < cells.size(); ++i) cells[i] = 0.0;
        for (std::size_t i = lb; i < dens_out.size(); ++i) dens_out[i] = 0.0;
    }

    double defect = 0.0;
    GridMeasure m = GridMeasure::from_segment_masses(std::move(xs), cells, std::move(out_atoms),
                                                     5e-2, &defect);
    if (stats) {
        stats->mass_renorm_defect = defect;
        stats->renorm_flagged = defect > 1e-6;
    }
    m.set_density_values(std::move(dens_out));
    return m;
}

} // namespace

GridMeasure free_add_power(const AnalyticMeasure& m, double t, std::size_t n_points,
                           ConvolutionStats* stats) {
    if (!(t >= 1.0) || !std::isfinite(t))
        throw std::invalid_argument("free_add_power: needs t >= 1");
    if (t == 1.0) {
        // transform-backed inputs have no stored representation to return, so
        // they fall through and get sampled like any other power
        if (m.grid()) return *m.grid();
        if (m.closed_law()) return grid_from_law(*m.closed_law(), n_points);
    }

    std::vector<Atom> out_atoms = surviving_atoms_free(m.atoms(), t);
    double atom_mass = 0.0;
    for (const Atom& a : out_atoms) atom_mass += a.mass;

    if (atom_mass >= 1.0 - 1e-14)   // point masses just translate
        return GridMeasure::from_atoms(std::move(out_atoms));

    const double hi = t * m.support().second;
    std::vector<double> xs = make_grid(0.0, hi * (1.0 + 1e-12), n_points);
    insert_nodes(xs, out_atoms);

    FixedPointTracker trk;
    auto g_cont = [&](Cpx z) -> Cpx {
        const Cpx w = subordinate(m, t, z, &trk);
        Cpx g = m.cauchy(w);            // G_out(z) = G_mu(w(z))
        for (const Atom& a : out_atoms) g -= a.mass / (z - a.location);
        return g;
    };
    std::vector<char> bulk;
    const std::vector<double> dens = stieltjes_density(g_cont, xs, default_eps_schedule(), &bulk);
    GridMeasure out = continuous_from_density(std::move(xs), dens, bulk, std::move(out_atoms),
                                              stats, 10.0 * default_eps_schedule().back());
    if (stats) {
        stats->max_fixed_point_iters = trk.max_iters;
        stats->worst_residual = trk.worst_residual;
    }
    return out;
}

GridMeasure free_add_power(const Law& m, double t, std::size_t n_points, ConvolutionStats* stats) {
    return free_add_power(AnalyticMeasure(m), t, n_points, stats);
}
GridMeasure free_add_power(const GridMeasure& m, double t, std::size_t n_points,
                           ConvolutionStats* stats) {
    return free_add_power(AnalyticMeasure(m), t, n_points, stats);
}

// --- Boolean additive power --------------------------------------------------

namespace {

// exact path for finitely many atoms: the transformed F has one zero in each
// interval cut out by the poles (zeros of G) and the masses are 1/F'
GridMeasure boolean_power_atomic(const std::vector<Atom>& atoms, double t) {
    if (atoms.size() == 1)
        return GridMeasure::from_atoms({{t * atoms[0].location, 1.0}});

    auto g = [&](double x) { return atom_cauchy(atoms, x); };
    auto f_out = [&](double x) { return (1.0 - t) * x + t / g(x); };
    auto f_out_deriv = [&](double x) {
        double s = 0.0;
        for (const Atom& a : atoms)
            s += a.mass / ((x - a.location) * (x - a.location));
        const double gv = g(x);
        return (1.0 - t) + t * s / (gv * gv);
    };

    // poles of F_out: zeros of G between consecutive atoms
    std::vector<double> poles;
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        const double a = atoms[i].location, b = atoms[i + 1].location;
        double d = (b - a) * 1e-3;
        while (!(g(a + d) > 0.0 && g(b - d) < 0.0) && d > (b - a) * 1e-14) d *= 0.1;
        poles.push_back(brent(g, a + d, b - d, {1e-15, 0.0, 300}));
    }

    std::vector<Atom> out;
    const double span = atoms.back().location - atoms.front().location + 1.0;
    for (std::size_t k = 0; k <= poles.size(); ++k) {
        double root;
        if (k == 0 && atoms.front().location == 0.0) {
            root = 0.0;   // the atom at 0 never moves
        } else if (k == 0) {
            double a = atoms.front().location - (t + 1.0) * span;
            double b = poles[0];
            double d = (b - a) * 1e-6;
            while (!(f_out(b - d) > 0.0) && d > (b - a) * 1e-15) d *= 0.1;
            root = brent(f_out, a, b - d, {1e-14, 0.0, 300});
        } else if (k == poles.size()) {
            double a = poles.back();
            double d = std::max(1.0, std::abs(a)) * 1e-6;
            while (!(f_out(a + d) < 0.0) && d > 1e-15) d *= 0.1;
            double b = a + std::max(1.0, t) * span;
            while (f_out(b) < 0.0) b += std::max(1.0, t) * span;
            root = brent(f_out, a + d, b, {1e-14, 0.0, 300});
        } else {
            const double a = poles[k - 1], b = poles[k];
            double d = (b - a) * 1e-6;
            while (!(f_out(a + d) < 0.0 && f_out(b - d) > 0.0) && d > (b - a) * 1e-15) d *= 0.1;
            root = brent(f_out, a + d, b - d, {1e-14, 0.0, 300});
        }
        double mass;
        if (root == 0.0 && atoms.front().location == 0.0) {
            const double a0 = atoms.front().mass;
            mass = a0 / (t - (t - 1.0) * a0);
        } else {
            mass = 1.0 / f_out_deriv(root);
        }
        if (root < -1e-9)
            throw NumericError("boolean_add_power: output atom escaped below 0");
        out.push_back({std::max(root, 0.0), mass});
    }
    return GridMeasure::from_atoms(std::move(out));
}

} // namespace

GridMeasure boolean_add_power(const AnalyticMeasure& m, double t, std::size_t n_points,
                              ConvolutionStats* stats) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("boolean_add_power: needs t > 0");
    if (t == 1.0) {
        if (m.grid()) return *m.grid();
        if (m.closed_law()) return grid_from_law(*m.closed_law(), n_points);
    }

    if (m.purely_atomic()) return boolean_power_atomic(m.atoms(), t);

    const auto crange = *m.continuous_range();
    const double a0_in = m.atom_at_zero();

    auto f_out_c = [&](Cpx z) { return (1.0 - t) * z + t / m.cauchy(z); };
    auto f_out_r = [&](double x) { return (1.0 - t) * x + t / m.cauchy_real(x); };
    auto f_out_deriv = [&](double x) {
        if (m.transform_backed()) {
            // an inner fixed point converged to ~1e-12 leaves phase-mixed
            // residuals in the imaginary component that swamp a 1e-120 step,
            // so iterative transforms get an ordinary central difference
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            return (f_out_r(x + h) - f_out_r(x - h)) / (2.0 * h);
        }
        // complex-step derivative: exact to machine precision for analytic F
        const double h = 1e-120 * std::max(1.0, std::abs(x));
        return f_out_c(Cpx(x, h)).imag() / h;
    };

    std::vector<Atom> out_atoms;
    if (a0_in > 0.0)
        out_atoms.push_back({0.0, a0_in / (t - (t - 1.0) * a0_in)});

    // real root scan over the complement of the support hull.  Between the
    // hull components F_out is strictly increasing, so a sign change over a
    // scan interval pins down exactly one new atom.
    std::vector<std::pair<double, double>> scan;
    std::vector<double> uppers;   // atoms above the bulk split the upper region
    for (const Atom& a : m.atoms())
        if (a.location > crange.second) uppers.push_back(a.location);
    std::sort(uppers.begin(), uppers.end());
    if (a0_in == 0.0 && crange.first > 0.0)
        scan.push_back({0.0, crange.first});
    double prev = crange.second;
    for (double up : uppers) {
        scan.push_back({prev, up});
        prev = up;
    }
    scan.push_back({prev, kInf});

    for (auto [lo, hi2] : scan) {
        const double width = std::isfinite(hi2) ? hi2 - lo : std::max(1.0, t) * (lo + 1.0);
        double d = width * 1e-7;
        double a = lo + d, fa = f_out_r(a);
        int shrink = 0;
        while (fa > 0.0 && shrink < 8) { d *= 0.1; a = lo + d; fa = f_out_r(a); ++shrink; }
        if (fa > 0.0) continue;           // F_out already positive: no root here
        double b, fb;
        if (std::isfinite(hi2)) {
            double e = width * 1e-7;
            b = hi2 - e; fb = f_out_r(b);
            int sh2 = 0;
            while (fb < 0.0 && sh2 < 8) { e *= 0.1; b = hi2 - e; fb = f_out_r(b); ++sh2; }
            if (fb < 0.0) continue;       // stays negative across the gap: no root
        } else {
            b = lo + width; fb = f_out_r(b);
            int grow = 0;
            while (fb < 0.0 && grow < 200) { b += width * std::pow(2.0, grow); fb = f_out_r(b); ++grow; }
            if (fb < 0.0)
                throw NumericError("boolean_add_power: upper atom bracket expansion failed");
        }
        const double root = brent(f_out_r, a, b, fa, fb, {1e-14, 0.0, 300});
        out_atoms.push_back({root, 1.0 / f_out_deriv(root)});
    }

    // continuous part: same spectral set as the input bulk
    std::vector<double> xs = make_grid(crange.first > 1e-12 ? crange.first : 0.0,
                                       crange.second, n_points);
    insert_nodes(xs, out_atoms);
    auto g_cont = [&](Cpx z) -> Cpx {
        Cpx g = 1.0 / f_out_c(z);
        for (const Atom& a : out_atoms) g -= a.mass / (z - a.location);
        return g;
    };
    // Closed-form transforms are smooth at any imaginary offset and need no
    // fixed-point iteration, so a much deeper schedule is affordable and
    // shrinks the smoothing radius.  Grid-backed inputs must not go deep: once
    // eps drops below the cell width the probes resolve the staircase density
    // and its kinks; transform-backed (iterative) inputs stay shallow too,
    // where the quadratic Richardson step already reaches the same accuracy.
    std::vector<double> eps = default_eps_schedule();
    if (m.closed_law())
        for (int k = 7; k <= 12; ++k) eps.push_back(1e-2 * std::pow(2.0, -k));
    std::vector<char> bulk;
    const std::vector<double> dens = stieltjes_density(g_cont, xs, eps, &bulk);
    return continuous_from_density(std::move(xs), dens, bulk, std::move(out_atoms), stats,
                                   10.0 * eps.back());
}

GridMeasure boolean_add_power(const Law& m, double t, std::size_t n_points,
                              ConvolutionStats* stats) {
    return boolean_add_power(AnalyticMeasure(m), t, n_points, stats);
}
GridMeasure boolean_add_power(const GridMeasure& m, double t, std::size_t n_points,
                              ConvolutionStats* stats) {
    return boolean_add_power(AnalyticMeasure(m), t, n_points, stats);
}

// --- composite operator B_t --------------------------------------------------

namespace {

// Locate the continuous-bulk hull of a measure given only its (atom-free)
// Cauchy transform: coarse scan of the bulk flag over the containment hull,
// then bisection on each edge.  The flag transition is only sharp to about the
// epsilon floor of the schedule, so callers should widen the result before
// trusting it as an "outside the bulk" certificate.
std::pair<double, double> detect_bulk_range(const std::function<Cpx(Cpx)>& g,
                                            double lo, double hi) {
    const std::vector<double> eps = default_eps_schedule();
    auto in_bulk = [&](double x) {
        std::vector<char> b;
        stieltjes_density(g, {x}, eps, &b);
        return b[0] != 0;
    };
    const std::size_t n = 129;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    std::vector<char> flags;
    stieltjes_density(g, xs, eps, &flags);
    std::size_t f = 0;
    while (f < n && !flags[f]) ++f;
    std::size_t l = n;
    while (l > 0 && !flags[l - 1]) --l;
    if (f >= l)
        throw NumericError("detect_bulk_range: no continuous bulk found in the hull");

    auto bisect = [&](double outside, double inside) {
        for (int k = 0; k < 30; ++k) {
            const double mid = 0.5 * (outside + inside);
            (in_bulk(mid) ? inside : outside) = mid;
        }
        return 0.5 * (outside + inside);
    };
    const double elo = f == 0 ? lo : bisect(xs[f - 1], xs[f]);
    const double ehi = l == n ? hi : bisect(xs[l], xs[l - 1]);
    return {elo, ehi};
}

} // namespace

GridMeasure b_t_operator(const Law& mu, double t, std::size_t n_points,
                         ConvolutionStats* stats) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("b_t_operator: needs t >= 0");
    if (t == 0.0) return grid_from_law(mu, n_points);
    const double s = 1.0 + t;
    auto base = std::make_shared<const AnalyticMeasure>(mu);

    std::vector<Atom> fp_atoms = surviving_atoms_free(base->atoms(), s);
    double atom_mass = 0.0;
    for (const Atom& a : fp_atoms) atom_mass += a.mass;
    if (atom_mass >= 1.0 - 1e-14)   // free stage stayed purely atomic
        return boolean_power_atomic(fp_atoms, 1.0 / s);

    auto trk = std::make_shared<FixedPointTracker>();
    TransformSpec spec;
    spec.label = mu.name() + " free power " + std::to_string(s);
    const auto hull = base->support();
    spec.support = {s * hull.first, s * hull.second};
    spec.cauchy = [base, s, trk](Cpx z) -> Cpx {
        return base->cauchy(subordinate(*base, s, z, trk.get()));
    };
    spec.cauchy_real = [base, s, trk](double x) -> double {
        return base->cauchy(subordinate(*base, s, Cpx(x, 0.0), trk.get())).real();
    };
    spec.atoms = fp_atoms;

    // bulk edges of the free stage, probed on the atom-subtracted transform;
    // widen by a few epsilon floors (the flag resolution) so the boolean
    // stage's root scan cannot stray into the true bulk, then clamp to the
    // hull so exactly-touching edges stay exact
    auto g_cont = [&spec](Cpx z) -> Cpx {
        Cpx g = spec.cauchy(z);
        for (const Atom& a : spec.atoms) g -= a.mass / (z - a.location);
        return g;
    };
    auto cr = detect_bulk_range(g_cont, spec.support.first, spec.support.second);
    const double margin = 3.0 * default_eps_schedule().back();
    cr.first = std::max(spec.support.first, cr.first - margin);
    cr.second = std::min(spec.support.second, cr.second + margin);
    spec.crange = cr;

    GridMeasure out = boolean_add_power(AnalyticMeasure(std::move(spec)), 1.0 / s,
                                        n_points, stats);
    if (stats) {
        stats->max_fixed_point_iters = trk->max_iters;
        stats->worst_residual = trk->worst_residual;
    }
    return out;
}

} // namespace freemax
