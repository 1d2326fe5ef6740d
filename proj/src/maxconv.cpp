#include "freemax/maxconv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace freemax {
namespace {

double clamp_unit(double v) {
    if (!(v > 0.0)) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

std::string tagged(const std::string& op, const Cdf& f) {
    if (f.label().empty()) return op;
    return op + "(" + f.label() + ")";
}

} // namespace

double classical_max_value(double v, double t) {
    return std::pow(clamp_unit(v), t);
}

double free_max_value(double v, double t) {
    double w = t * clamp_unit(v) - (t - 1.0);
    if (w <= 0.0) return 0.0;
    return w > 1.0 ? 1.0 : w;
}

double boolean_max_value(double v, double t) {
    v = clamp_unit(v);
    double denom = t - (t - 1.0) * v;   // >= min(t,1) for v in [0,1]
    if (denom <= 0.0) return 1.0;
    return clamp_unit(v / denom);
}

double lambda_vee_value(double v) {
    v = clamp_unit(v);
    if (v == 0.0) return 0.0;
    double w = 1.0 + std::log(v);
    return w > 0.0 ? w : 0.0;
}

double pi_vee_value(double v) {
    return std::exp(clamp_unit(v) - 1.0);
}

double x_vee_value(double v) {
    v = clamp_unit(v);
    if (v == 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / v);
}

double x_vee_inv_value(double v) {
    v = clamp_unit(v);
    if (v == 0.0) return 0.0;
    return 1.0 / (1.0 - std::log(v));
}

Cdf classical_max_pow(const Cdf& f, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("classical max power needs t > 0");
    Cdf out([f, t](double x) { return classical_max_value(f(x), t); },
            f.support_lo(), f.support_hi(),
            tagged("cmax^" + std::to_string(t), f));
    if (f.has_closed_quantile()) {
        out.set_quantile([f, t](double p) { return f.quantile(std::pow(p, 1.0 / t)); });
    }
    return out;
}

Cdf free_max_pow(const Cdf& f, double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("free max power needs t >= 1");
    if (t == 1.0) return f;
    // the value map kills everything below the (t-1)/t quantile
    double lo = f.quantile((t - 1.0) / t);
    Cdf out([f, t](double x) { return free_max_value(f(x), t); },
            lo, f.support_hi(),
            tagged("fmax^" + std::to_string(t), f));
    out.set_quantile([f, t](double p) { return f.quantile((p + t - 1.0) / t); });
    return out;
}

Cdf boolean_max_pow(const Cdf& f, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("boolean max power needs t > 0");
    if (f.support_lo() < 0.0)
        throw std::invalid_argument("boolean max power is defined on [0,inf)-supported CDFs only");
    if (t == 1.0) return f;
    Cdf out([f, t](double x) { return boolean_max_value(f(x), t); },
            f.support_lo(), f.support_hi(),
            tagged("bmax^" + std::to_string(t), f));
    if (f.has_closed_quantile()) {
        out.set_quantile([f, t](double p) {
            p = clamp_unit(p);
            return f.quantile(p * t / (1.0 + (t - 1.0) * p));
        });
    }
    return out;
}

Cdf lambda_vee(const Cdf& f) {
    double lo = f.quantile(std::exp(-1.0));
    Cdf out([f](double x) { return lambda_vee_value(f(x)); },
            lo, f.support_hi(), tagged("lambda_vee", f));
    out.set_quantile([f](double p) { return f.quantile(std::exp(clamp_unit(p) - 1.0)); });
    return out;
}

Cdf pi_vee(const Cdf& f) {
    // the output always carries an atom at 0 (mass >= 1/e): it absorbs the
    // whole sub-zero part of the input along with the exp(-1) base weight
    double mass0 = std::exp(clamp_unit(f(0.0)) - 1.0);
    Cdf out([f](double x) { return x < 0.0 ? 0.0 : pi_vee_value(f(x)); },
            0.0, f.support_hi(), tagged("pi_vee", f));
    out.set_quantile([f, mass0](double p) {
        p = clamp_unit(p);
        if (p <= mass0) return 0.0;
        return f.quantile(1.0 + std::log(p));
    });
    return out;
}

Cdf x_vee(const Cdf& f) {
    Cdf out([f](double x) { return x_vee_value(f(x)); },
            f.support_lo(), f.support_hi(), tagged("x_vee", f));
    if (f.has_closed_quantile()) {
        out.set_quantile([f](double p) { return f.quantile(x_vee_inv_value(p)); });
    }
    return out;
}

Cdf x_vee_inv(const Cdf& f) {
    Cdf out([f](double x) { return x_vee_inv_value(f(x)); },
            f.support_lo(), f.support_hi(), tagged("x_vee_inv", f));
    if (f.has_closed_quantile()) {
        out.set_quantile([f](double p) { return f.quantile(x_vee_value(p)); });
    }
    return out;
}

Cdf b_t_vee(const Cdf& f, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("b_t_vee needs t >= 0");
    if (t == 0.0) return f;
    return boolean_max_pow(free_max_pow(f, 1.0 + t), 1.0 / (1.0 + t));
}

} // namespace freemax
