#include "freemax/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "freemax/errors.hpp"

namespace freemax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_grid(const std::vector<double>& x) {
    if (x.size() == 1) throw std::invalid_argument("grid must have 0 or >= 2 nodes");
    if (!x.empty() && (x.front() < 0.0 || !std::isfinite(x.front())))
        throw std::invalid_argument("grid must live on [0, inf)");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]) || !std::isfinite(x[i]))
            throw std::invalid_argument("grid nodes must be finite and strictly increasing");
}

std::vector<Atom> tidy_atoms(std::vector<Atom> atoms) {
    for (const Atom& a : atoms) {
        if (a.location < 0.0 || !std::isfinite(a.location))
            throw std::invalid_argument("atom locations must be finite and >= 0");
        if (a.mass < -1e-12)
            throw std::invalid_argument("atom masses must be >= 0");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::vector<Atom> out;
    for (const Atom& a : atoms) {
        if (a.mass <= 1e-15) continue;   // drop numerical dust
        if (!out.empty() &&
            std::abs(a.location - out.back().location) <= 1e-12 * std::max(1.0, a.location))
            out.back().mass += a.mass;
        else
            out.push_back(a);
    }
    return out;
}

} // namespace

GridMeasure::GridMeasure(std::vector<double> x, std::vector<double> cdf_at_x,
                         std::vector<Atom> atoms, double mass_tol) {
    check_grid(x);
    if (cdf_at_x.size() != x.size())
        throw std::invalid_argument("cdf_values size must match grid size");
    x_ = std::move(x);
    atoms_ = tidy_atoms(std::move(atoms));

    // peel atoms out of the supplied total-CDF samples
    cont_cdf_.resize(x_.size());
    std::size_t ai = 0;
    double atom_cum = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        while (ai < atoms_.size() &&
               atoms_[ai].location <= x_[i] + 1e-12 * std::max(1.0, x_[i])) {
            // interior atoms must sit on a node
            if (atoms_[ai].location > x_.front() + 1e-12 &&
                std::abs(atoms_[ai].location - x_[i]) > 1e-9 * std::max(1.0, x_[i]))
                throw std::invalid_argument("atoms inside the grid range must coincide with grid nodes");
            atoms_[ai].location = (std::abs(atoms_[ai].location - x_[i]) <= 1e-9 * std::max(1.0, x_[i]))
                                      ? x_[i] : atoms_[ai].location;
            atom_cum += atoms_[ai].mass;
            ++ai;
        }
        cont_cdf_[i] = cdf_at_x[i] - atom_cum;
        if (cont_cdf_[i] < -1e-9)
            throw std::invalid_argument("cdf_values inconsistent with atom masses");
        cont_cdf_[i] = std::max(cont_cdf_[i], 0.0);
        if (i > 0 && cont_cdf_[i] < cont_cdf_[i - 1] - 1e-12)
            throw std::invalid_argument("cdf_values must be nondecreasing");
        if (i > 0) cont_cdf_[i] = std::max(cont_cdf_[i], cont_cdf_[i - 1]);
    }
    if (!cont_cdf_.empty() && cont_cdf_.front() > mass_tol)
        throw std::invalid_argument("continuous CDF must start at 0 at the first grid node");
    if (!cont_cdf_.empty()) cont_cdf_.front() = 0.0;
    finalize(mass_tol, nullptr);
}

GridMeasure GridMeasure::from_atoms(std::vector<Atom> atoms, double mass_tol) {
    GridMeasure m;
    m.atoms_ = tidy_atoms(std::move(atoms));
    if (m.atoms_.empty()) throw std::invalid_argument("measure needs at least one atom");
    m.finalize(mass_tol, nullptr);
    return m;
}

GridMeasure GridMeasure::from_segment_masses(std::vector<double> x,
                                             const std::vector<double>& cell_mass,
                                             std::vector<Atom> atoms, double mass_tol,
                                             double* renorm_defect) {
    check_grid(x);
    if (!x.empty() && cell_mass.size() + 1 != x.size())
        throw std::invalid_argument("need one cell mass per grid cell");
    GridMeasure m;
    m.x_ = std::move(x);
    m.atoms_ = tidy_atoms(std::move(atoms));
    m.cont_cdf_.resize(m.x_.size());
    if (!m.x_.empty()) {
        m.cont_cdf_[0] = 0.0;
        for (std::size_t i = 0; i < cell_mass.size(); ++i) {
            if (cell_mass[i] < -1e-12)
                throw std::invalid_argument("cell masses must be >= 0");
            m.cont_cdf_[i + 1] = m.cont_cdf_[i] + std::max(cell_mass[i], 0.0);
        }
    }
    m.finalize(mass_tol, renorm_defect);
    return m;
}

void GridMeasure::finalize(double mass_tol, double* renorm_defect) {
    double atom_mass = 0.0;
    for (const Atom& a : atoms_) atom_mass += a.mass;
    if (atom_mass > 1.0 + mass_tol)
        throw NumericError("atom masses exceed 1");
    const double raw_cont = cont_cdf_.empty() ? 0.0 : cont_cdf_.back();
    const double target = 1.0 - std::min(atom_mass, 1.0);
    const double defect = std::abs(raw_cont + atom_mass - 1.0);
    if (renorm_defect) *renorm_defect = defect;
    if (defect > mass_tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "mass conservation violated: atoms %.12g + continuous %.12g (defect %.3g > %.3g)",
                      atom_mass, raw_cont, defect, mass_tol);
        throw NumericError(buf);
    }
    if (raw_cont > 0.0) {
        const double s = target > 0.0 ? target / raw_cont : 0.0;
        for (double& c : cont_cdf_) c *= s;
    } else if (target > mass_tol) {
        throw NumericError("measure has no continuous part but atoms miss mass");
    }
    cont_mass_ = cont_cdf_.empty() ? 0.0 : cont_cdf_.back();
    // atoms carry everything: normalize them exactly instead
    if (cont_mass_ == 0.0 && atom_mass > 0.0)
        for (Atom& a : atoms_) a.mass /= atom_mass;

    // cache total-CDF samples at nodes
    total_cdf_.resize(x_.size());
    std::size_t ai = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        while (ai < atoms_.size() && atoms_[ai].location <= x_[i]) {
            cum += atoms_[ai].mass;
            ++ai;
        }
        total_cdf_[i] = cum + cont_cdf_[i];
    }
}

double GridMeasure::atom_at_zero() const {
    for (const Atom& a : atoms_) {
        if (a.location == 0.0) return a.mass;
        if (a.location > 0.0) break;
    }
    return 0.0;
}

double GridMeasure::cdf(double x) const {
    if (x < 0.0) return 0.0;
    double v = 0.0;
    for (const Atom& a : atoms_) {
        if (a.location > x) break;
        v += a.mass;
    }
    if (x_.empty() || x < x_.front()) return v;
    if (x >= x_.back()) return v + cont_mass_;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return v + cont_cdf_[i] + w * (cont_cdf_[i + 1] - cont_cdf_[i]);
}

double GridMeasure::quantile(double p) const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p must lie in [0,1]");
    const double lo_supp = support().first;
    if (p <= 0.0) return lo_supp;

    // atoms at or below the first grid node come first
    double cum = 0.0;
    std::size_t ai = 0;
    const double x0 = x_.empty() ? kInf : x_.front();
    while (ai < atoms_.size() && atoms_[ai].location <= x0) {
        cum += atoms_[ai].mass;
        if (p <= cum) return atoms_[ai].location;
        ++ai;
    }
    if (!x_.empty() && p <= total_cdf_.back()) {
        const auto it = std::lower_bound(total_cdf_.begin(), total_cdf_.end(), p);
        std::size_t i = static_cast<std::size_t>(it - total_cdf_.begin());
        if (i == 0) return x_.front();
        const double f_left = total_cdf_[i - 1];
        const double seg = cont_cdf_[i] - cont_cdf_[i - 1];
        if (p <= f_left + seg && seg > 0.0)
            return x_[i - 1] + (p - f_left) / seg * (x_[i] - x_[i - 1]);
        return x_[i];   // remaining jump is the atom on node i
    }
    // beyond the grid: trailing atoms
    double cum2 = x_.empty() ? cum : total_cdf_.back();
    for (const Atom& a : atoms_) {
        if (!x_.empty() && a.location <= x_.back()) continue;
        if (x_.empty()) continue;   // purely atomic case was fully handled above
        cum2 += a.mass;
        if (p <= cum2) return a.location;
    }
    return support().second;   // p == 1 up to rounding
}

double GridMeasure::cell_density(std::size_t i) const {
    return cell_mass(i) / (x_[i + 1] - x_[i]);
}

std::vector<double> GridMeasure::density_values() const {
    if (!density_.empty()) return density_;
    std::vector<double> d(x_.size(), 0.0);
    if (x_.size() < 2) return d;
    d[0] = cell_density(0);
    for (std::size_t i = 1; i + 1 < x_.size(); ++i)
        d[i] = 0.5 * (cell_density(i - 1) + cell_density(i));
    d[x_.size() - 1] = cell_density(x_.size() - 2);
    return d;
}

void GridMeasure::set_density_values(std::vector<double> d) {
    if (d.size() != x_.size())
        throw std::invalid_argument("density sample count must match grid size");
    density_ = std::move(d);
}

std::pair<double, double> GridMeasure::support() const {
    double lo = kInf, hi = -kInf;
    if (!atoms_.empty()) {
        lo = atoms_.front().location;
        hi = atoms_.back().location;
    }
    // first/last cell actually carrying mass
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
        if (cell_mass(i) > 0.0) { lo = std::min(lo, x_[i]); break; }
    for (std::size_t i = x_.size(); i >= 2; --i)
        if (cell_mass(i - 2) > 0.0) { hi = std::max(hi, x_[i - 1]); break; }
    return {lo, hi};
}

double GridMeasure::mean() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.mass * a.location;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
        m += cell_mass(i) * 0.5 * (x_[i] + x_[i + 1]);   // exact for PL CDF
    return m;
}

double GridMeasure::inv_moment() const {
    if (atom_at_zero() > 0.0) return kInf;
    double v = 0.0;
    for (const Atom& a : atoms_)
        v += a.mass / a.location;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        const double m = cell_mass(i);
        if (m <= 0.0) continue;
        if (x_[i] <= 0.0) return kInf;              // constant density down to 0
        v += m * std::log(x_[i + 1] / x_[i]) / (x_[i + 1] - x_[i]);
    }
    return v > 1e12 ? kInf : v;
}

GridMeasure GridMeasure::dilated(double c) const {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("dilation factor must be finite and > 0");
    GridMeasure m(*this);
    for (double& xi : m.x_) xi *= c;
    for (Atom& a : m.atoms_) a.location *= c;
    for (double& d : m.density_) d /= c;
    return m;
}

GridMeasure GridMeasure::power(double s) const {
    if (s == 0.0 || !std::isfinite(s))
        throw std::invalid_argument("power exponent must be finite and nonzero");
    GridMeasure m;
    m.atoms_ = atoms_;
    for (Atom& a : m.atoms_) {
        if (a.location == 0.0 && s < 0.0)
            throw std::invalid_argument("cannot apply negative power to an atom at 0");
        a.location = std::pow(a.location, s);
    }
    std::sort(m.atoms_.begin(), m.atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });

    if (!x_.empty()) {
        if (s < 0.0 && x_.front() <= 0.0)
            throw std::invalid_argument("cannot apply negative power to mass at 0");
        m.x_.resize(x_.size());
        m.cont_cdf_.resize(x_.size());
        const std::size_t n = x_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = s > 0.0 ? i : n - 1 - i;
            m.x_[i] = std::pow(x_[j], s);
            m.cont_cdf_[i] = s > 0.0 ? cont_cdf_[j] : cont_mass_ - cont_cdf_[j];
        }
    }
    m.finalize(1e-9, nullptr);
    return m;
}

} // namespace freemax
