#include "freemax/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "freemax/errors.hpp"
#include "freemax/maxconv.hpp"
#include "freemax/transforms.hpp"

namespace freemax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The continuous part of the image lives on the open interval (a, b); points
// this close to the edges (relatively) are snapped onto them before inverting
// the S-transform, which would otherwise be asked for values outside its image.
constexpr double kEdgeDelta = 1e-9;

PhiResult dirac_phi(double location, std::string label) {
    Cdf cdf([location](double x) { return x >= location ? 1.0 : 0.0; },
            location, location, std::move(label));
    cdf.set_quantile([location](double) { return location; });
    PhiResult r{std::move(cdf), location == 0.0 ? 1.0 : 0.0, location, location, true};
    return r;
}

PhiResult phi_closed(const STransform& s) {
    const double atom0 = s.atom_at_zero();
    const double a = s.a();
    const double b = s.b();

    auto eval = [s, atom0, a, b](double x) {
        if (x < 0.0) return 0.0;
        if (x <= a * (1.0 + kEdgeDelta)) return atom0;
        if (std::isfinite(b) && x >= b * (1.0 - kEdgeDelta)) return 1.0;
        double v = s.inverse(1.0 / x) + 1.0;
        if (v < atom0) v = atom0;
        return v > 1.0 ? 1.0 : v;
    };
    auto quantile = [s, atom0, a, b](double p) {
        if (p <= atom0) return atom0 > 0.0 ? 0.0 : a;
        if (p >= 1.0) return b;
        return 1.0 / s(p - 1.0);
    };

    Cdf cdf(eval, atom0 > 0.0 ? 0.0 : a, b,
            s.label().empty() ? "phi" : "phi(" + s.label() + ")");
    cdf.set_quantile(quantile);
    return PhiResult{std::move(cdf), atom0, a, b, true};
}

// For a numerically backed S we sweep its whole domain once and keep the
// image as a piecewise-linear CDF; every later evaluation is a binary search
// instead of a fixed-point solve.
PhiResult phi_tabulated(const STransform& s) {
    const int n = 2049;
    const double atom0 = s.atom_at_zero();
    const double a = s.a();
    const double b = s.b();
    const double lo = s.domain_lo();
    const double width = -lo;

    struct Table {
        std::vector<double> x, f;
    };
    Table t;
    t.x.reserve(n + 2);
    t.f.reserve(n + 2);
    t.x.push_back(a);
    t.f.push_back(atom0);
    for (int j = 0; j < n; ++j) {
        // cosine spacing crowds samples toward both ends of the domain, where
        // x = 1/S(z) races toward the support edges
        double tau = (j + 0.5) / n;
        double z = lo + width * 0.5 * (1.0 - std::cos(M_PI * tau));
        double sv = s(z);
        if (!std::isfinite(sv) || !(sv > 0.0)) continue;
        double x = 1.0 / sv;
        double F = z + 1.0;
        if (x <= t.x.back() * (1.0 + 1e-12) || x <= t.x.back()) continue;
        if (F <= t.f.back()) continue;
        t.x.push_back(x);
        t.f.push_back(F);
    }
    if (t.x.size() < 8) throw NumericError("phi: S-transform sweep produced too few usable points");
    if (std::isfinite(b) && b > t.x.back()) {
        t.x.push_back(b);
        t.f.push_back(1.0);
    } else {
        t.f.back() = 1.0;
    }

    auto tab = std::make_shared<const Table>(std::move(t));
    auto eval = [tab, atom0](double x) {
        const auto& xs = tab->x;
        const auto& fs = tab->f;
        if (x < 0.0) return 0.0;
        if (x <= xs.front()) return atom0;
        if (x >= xs.back()) return 1.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        size_t i = static_cast<size_t>(it - xs.begin()) - 1;
        double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return fs[i] + w * (fs[i + 1] - fs[i]);
    };
    auto quantile = [tab, atom0, a](double p) {
        const auto& xs = tab->x;
        const auto& fs = tab->f;
        if (p <= atom0) return atom0 > 0.0 ? 0.0 : a;
        if (p >= 1.0) return xs.back();
        auto it = std::lower_bound(fs.begin(), fs.end(), p);
        if (it == fs.begin()) return xs.front();
        if (it == fs.end()) return xs.back();
        size_t i = static_cast<size_t>(it - fs.begin());
        double w = (p - fs[i - 1]) / (fs[i] - fs[i - 1]);
        return xs[i - 1] + w * (xs[i] - xs[i - 1]);
    };

    double hi = std::isfinite(b) ? b : tab->x.back();
    Cdf cdf(eval, atom0 > 0.0 ? 0.0 : a, hi,
            s.label().empty() ? "phi" : "phi(" + s.label() + ")");
    cdf.set_quantile(quantile);
    return PhiResult{std::move(cdf), atom0, a, b, false};
}

} // namespace

STransform stable_s_transform(double alpha, StableKind kind) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("stable index must satisfy 0 < alpha < 1");
    const double expo = (1.0 - alpha) / alpha;
    if (kind == StableKind::free) {
        return STransform([expo](double z) { return std::pow(-z, expo); },
                          0.0, 1.0, kInf, STransform::Provenance::closed_form,
                          "fstable:" + std::to_string(alpha));
    }
    return STransform([expo](double z) { return std::pow(-z / (1.0 + z), expo); },
                      0.0, 0.0, kInf, STransform::Provenance::closed_form,
                      "bstable:" + std::to_string(alpha));
}

PhiResult phi(const STransform& s) {
    if (s.constant())
        return dirac_phi(s.constant_location(),
                         s.label().empty() ? "phi" : "phi(" + s.label() + ")");
    if (s.atom_at_zero() >= 1.0 - 1e-12) return dirac_phi(0.0, "phi");
    return s.closed_form() ? phi_closed(s) : phi_tabulated(s);
}

PhiResult phi(const Law& law) {
    if (law.is<Dirac>())
        return dirac_phi(law.as<Dirac>().location, "phi(" + law.name() + ")");
    return phi(s_transform(law));
}

PhiResult phi(const GridMeasure& m) {
    if (!m.has_continuous_part() && m.atoms().size() == 1)
        return dirac_phi(m.atoms().front().location, "phi");
    return phi(s_transform(m));
}

Law chi_inverse_catalog(const Law& law) {
    if (law.is<Poisson>()) {
        const double lam = law.as<Poisson>().lambda;
        // The closed answer is a two-point law; recompute it through the
        // Boolean power machinery as a consistency check before returning.
        GridMeasure g = boolean_add_power(Law(TwoPoint{0.5, 2.0}), lam);
        const auto& at = g.atoms();
        bool ok = !g.has_continuous_part() && at.size() == 2 &&
                  std::abs(at[0].location) <= 1e-9 &&
                  std::abs(at[0].mass - 1.0 / (1.0 + lam)) <= 1e-9 &&
                  std::abs(at[1].location - (1.0 + lam)) <= 1e-9 * (1.0 + lam) &&
                  std::abs(at[1].mass - lam / (1.0 + lam)) <= 1e-9;
        if (!ok) throw NumericError("chi-inverse consistency check failed for " + law.name());
        return Law(TwoPoint{1.0 / (1.0 + lam), 1.0 + lam});
    }
    if (law.is<ClassicalStablePos>())
        return Law(BooleanStablePos{law.as<ClassicalStablePos>().alpha});
    throw std::invalid_argument("no chi-inverse catalog entry for " + law.name());
}

Cdf psi_op(const Law& law) {
    PhiResult p = phi(chi_inverse_catalog(law));
    Cdf out = x_vee(p.cdf);
    out.set_label("psi(" + law.name() + ")");
    return out;
}

} // namespace freemax
