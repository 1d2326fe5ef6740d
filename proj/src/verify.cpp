#include "freemax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "freemax/errors.hpp"
#include "freemax/maxconv.hpp"
#include "freemax/phi.hpp"
#include "freemax/transforms.hpp"

namespace freemax {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string atoms_note(const char* tag, const GridMeasure& g) {
    std::string s = tag;
    s += " atoms:";
    if (g.atoms().empty()) s += " none";
    for (const Atom& a : g.atoms())
        s += " (" + fmt(a.location) + ", " + fmt(a.mass) + ")";
    return s;
}

void append_note(VerificationReport& r, const std::string& extra) {
    if (!r.note.empty()) r.note += "; ";
    r.note += extra;
}

} // namespace

VerificationReport compare_on_quantile_grid(std::string theorem_id, std::string param,
                                            const Cdf& lhs, const Cdf& rhs,
                                            double tolerance, std::size_t n) {
    VerificationReport r;
    r.theorem_id = std::move(theorem_id);
    r.param = std::move(param);
    r.tolerance = tolerance;
    r.grid.reserve(n);
    r.lhs.reserve(n);
    r.rhs.reserve(n);
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        const double x = rhs.quantile(p);
        const double l = lhs(x);
        const double rv = rhs(x);
        r.grid.push_back(x);
        r.lhs.push_back(l);
        r.rhs.push_back(rv);
        const double d = std::abs(l - rv);
        if (!(d <= sup)) sup = d;   // NaN propagates into sup and fails below
    }
    r.sup_norm = sup;
    r.passed = sup <= tolerance;
    return r;
}

std::vector<VerificationReport> verify_thm_free(const Law& mu, double t,
                                                std::size_t grid_n,
                                                double closed_tol, double grid_tol) {
    if (!(t >= 1.0)) throw std::invalid_argument("free semigroup theorem needs t >= 1");
    std::vector<VerificationReport> out;
    const std::string param = "mu=" + mu.name() + " t=" + fmt(t);
    const Cdf rhs = free_max_pow(phi(mu).cdf, t);

    const STransform s = s_transform(mu);
    if (s.closed_form()) {
        const Cdf lhs = phi(dilation_s_rule(s_free_power(s, t), 1.0 / t)).cdf;
        out.push_back(compare_on_quantile_grid("free-max-semigroup.closed", param,
                                               lhs, rhs, closed_tol, grid_n));
    }
    try {
        GridMeasure g = free_add_power(mu, t);
        const Cdf lhs = phi(g.dilated(1.0 / t)).cdf;
        out.push_back(compare_on_quantile_grid("free-max-semigroup.grid", param,
                                               lhs, rhs, grid_tol, grid_n));
        append_note(out.back(), atoms_note("power", g));
    } catch (const UnsupportedLawError& e) {
        if (!out.empty()) append_note(out.back(), std::string("grid path skipped: ") + e.what());
    }
    return out;
}

std::vector<VerificationReport> verify_thm_boolean(const Law& mu, double t,
                                                   std::size_t grid_n,
                                                   double closed_tol, double grid_tol) {
    if (!(t > 0.0)) throw std::invalid_argument("boolean semigroup theorem needs t > 0");
    std::vector<VerificationReport> out;
    const std::string param = "mu=" + mu.name() + " t=" + fmt(t);
    const Cdf rhs = boolean_max_pow(phi(mu).cdf, t);

    const STransform s = s_transform(mu);
    if (s.closed_form()) {
        const Cdf lhs = phi(dilation_s_rule(s_boolean_power(s, t), 1.0 / t)).cdf;
        out.push_back(compare_on_quantile_grid("boolean-max-semigroup.closed", param,
                                               lhs, rhs, closed_tol, grid_n));
    }
    try {
        GridMeasure g = boolean_add_power(mu, t);
        const Cdf lhs = phi(g.dilated(1.0 / t)).cdf;
        out.push_back(compare_on_quantile_grid("boolean-max-semigroup.grid", param,
                                               lhs, rhs, grid_tol, grid_n));
        append_note(out.back(), atoms_note("power", g));
    } catch (const UnsupportedLawError& e) {
        if (!out.empty()) append_note(out.back(), std::string("grid path skipped: ") + e.what());
    }
    return out;
}

std::vector<VerificationReport> verify_thm_bn(const Law& mu, double t,
                                              std::size_t grid_n,
                                              double closed_tol, double grid_tol) {
    if (!(t >= 0.0)) throw std::invalid_argument("composite semigroup theorem needs t >= 0");
    std::vector<VerificationReport> out;
    const std::string param = "mu=" + mu.name() + " t=" + fmt(t);
    const Cdf rhs = b_t_vee(phi(mu).cdf, t);

    const STransform s = s_transform(mu);
    if (s.closed_form()) {
        const Cdf lhs = phi(s_bt_composite(s, t)).cdf;
        out.push_back(compare_on_quantile_grid("bn-semigroup.closed", param,
                                               lhs, rhs, closed_tol, grid_n));
    }
    try {
        GridMeasure g2 = b_t_operator(mu, t);
        const Cdf lhs = phi(g2).cdf;
        out.push_back(compare_on_quantile_grid("bn-semigroup.grid", param,
                                               lhs, rhs, grid_tol, grid_n));
        append_note(out.back(), atoms_note("composite", g2));
    } catch (const UnsupportedLawError& e) {
        if (!out.empty()) append_note(out.back(), std::string("grid path skipped: ") + e.what());
    }
    return out;
}

std::vector<VerificationReport> verify_thm_bn(const STransform& s, double t,
                                              std::size_t grid_n, double closed_tol) {
    if (!(t >= 0.0)) throw std::invalid_argument("composite semigroup theorem needs t >= 0");
    const std::string param = "mu=" + (s.label().empty() ? std::string("s-transform") : s.label())
                            + " t=" + fmt(t);
    const Cdf rhs = b_t_vee(phi(s).cdf, t);
    const Cdf lhs = phi(s_bt_composite(s, t)).cdf;
    std::vector<VerificationReport> out;
    out.push_back(compare_on_quantile_grid("bn-semigroup.closed", param,
                                           lhs, rhs, closed_tol, grid_n));
    return out;
}

VerificationReport verify_thm_classical(double lambda, double t,
                                        std::size_t grid_n, double tol) {
    if (!(lambda > 0.0) || !(t > 0.0))
        throw std::invalid_argument("classical semigroup theorem needs lambda > 0, t > 0");
    const std::string param = "lambda=" + fmt(lambda) + " t=" + fmt(t);
    const Cdf lhs = dilate(psi_op(Law(Poisson{lambda * t})), 1.0 / t);
    const Cdf rhs = classical_max_pow(psi_op(Law(Poisson{lambda})), t);
    VerificationReport r = compare_on_quantile_grid("classical-max-semigroup", param,
                                                    lhs, rhs, tol, grid_n);
    append_note(r, "atom at 0: lhs=" + fmt(lhs(0.0)) + " rhs=" + fmt(rhs(0.0)) +
                   " expected=" + fmt(std::exp(-lambda * t)));
    return r;
}

VerificationReport verify_mult_identity(const Law& mu, int n,
                                        std::size_t grid_n, double tol) {
    if (n < 1) throw std::invalid_argument("multiplicative power needs integer n >= 1");
    const std::string param = "mu=" + mu.name() + " n=" + fmt(n);
    const PhiResult base = phi(mu);
    const PhiResult powered = phi(free_mult_power_s(s_transform(mu), n));

    VerificationReport r;
    r.theorem_id = "mult-power";
    r.param = param;
    r.tolerance = tol;
    r.note = "lhs = phi(mu^boxtimes n) sampled at x^n, rhs = phi(mu) at x";
    double sup = 0.0;
    for (std::size_t j = 0; j < grid_n; ++j) {
        const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_n);
        const double x = base.cdf.quantile(p);
        const double l = powered.cdf(std::pow(x, n));
        const double rv = base.cdf(x);
        r.grid.push_back(x);
        r.lhs.push_back(l);
        r.rhs.push_back(rv);
        const double d = std::abs(l - rv);
        if (!(d <= sup)) sup = d;
    }
    r.sup_norm = sup;
    r.passed = sup <= tol;
    return r;
}

double free_prelimit_value(double v, double n) {
    if (!(v > 0.0)) v = 0.0;
    if (v > 1.0) v = 1.0;
    const double w = n * std::pow(v, 1.0 / n) - (n - 1.0);
    if (w <= 0.0) return 0.0;
    return w > 1.0 ? 1.0 : w;
}

double boolean_prelimit_value(double v, double n) {
    if (!(v > 0.0)) v = 0.0;
    if (v > 1.0) v = 1.0;
    const double r = std::pow(v, 1.0 / n);
    const double denom = n - (n - 1.0) * r;   // in [1, n]
    return r / denom;
}

std::vector<VerificationReport> verify_limit_props(const Cdf& f,
                                                   const std::vector<long>& n_list,
                                                   std::size_t grid_n, double tol) {
    if (n_list.empty()) throw std::invalid_argument("verify_limit_props: empty n list");
    std::vector<VerificationReport> out;
    const std::string flabel = f.label().empty() ? std::string("F") : f.label();

    struct Kind {
        const char* id;
        Cdf target;
        double (*pre)(double, double);
    };
    const Kind kinds[2] = {
        {"free-prelimit", lambda_vee(f), &free_prelimit_value},
        {"boolean-prelimit", x_vee_inv(f), &boolean_prelimit_value},
    };

    for (const Kind& k : kinds) {
        std::vector<double> sups;
        for (long n : n_list) {
            if (n < 1) throw std::invalid_argument("verify_limit_props: n must be >= 1");
            VerificationReport r;
            r.theorem_id = k.id;
            r.param = "F=" + flabel + " n=" + std::to_string(n);
            r.tolerance = tol;
            double sup = 0.0;
            for (std::size_t j = 0; j < grid_n; ++j) {
                const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_n);
                const double x = k.target.quantile(p);
                const double l = k.pre(f(x), static_cast<double>(n));
                const double rv = k.target(x);
                r.grid.push_back(x);
                r.lhs.push_back(l);
                r.rhs.push_back(rv);
                const double d = std::abs(l - rv);
                if (!(d <= sup)) sup = d;
            }
            r.sup_norm = sup;
            r.passed = sup <= tol;
            sups.push_back(sup);
            out.push_back(std::move(r));
        }
        VerificationReport mono;
        mono.theorem_id = std::string(k.id) + ".monotone";
        mono.param = "F=" + flabel + " n=" +
                     [&] {
                         std::string s;
                         for (long n : n_list) s += (s.empty() ? "" : ",") + std::to_string(n);
                         return s;
                     }();
        mono.tolerance = 0.0;
        double worst_increase = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < sups.size(); ++i)
            worst_increase = std::max(worst_increase, sups[i + 1] - sups[i]);
        mono.sup_norm = sups.size() > 1 ? worst_increase : 0.0;
        mono.passed = mono.sup_norm <= 0.0;
        mono.note = "largest adjacent change of sup-norm along n (<= 0 means decreasing)";
        out.push_back(std::move(mono));
    }
    return out;
}

} // namespace freemax
