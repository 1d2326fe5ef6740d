#include "freemax/cdf.hpp"

#include <cmath>
#include <limits>

#include "freemax/errors.hpp"

namespace freemax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Cdf::Cdf(Fn eval, double support_lo, double support_hi, std::string label)
    : eval_(std::move(eval)), lo_(support_lo), hi_(support_hi), label_(std::move(label)) {
    if (!eval_) throw std::invalid_argument("Cdf needs an evaluator");
    if (!(lo_ <= hi_)) throw std::invalid_argument("Cdf support hints out of order");
}

double Cdf::quantile(double p) const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p must lie in [0,1]");
    if (quantile_) return quantile_(p);
    if (p == 0.0) return lo_;

    // establish a finite bracket [a, b] with F(a) < p <= F(b)
    double a, b;
    if (std::isfinite(lo_)) {
        if (eval_(lo_) >= p) return lo_;
        a = lo_;
    } else {
        a = std::isfinite(hi_) ? hi_ - 1.0 : -1.0;
        for (int k = 0; eval_(a) >= p; ++k) {
            if (k > 2100) throw NumericError("Cdf::quantile: lower bracket expansion failed");
            a = (a < -1.0) ? a * 2.0 : a - 1.0;
        }
    }
    if (std::isfinite(hi_)) {
        b = hi_;
        if (eval_(b) < p) throw NumericError("Cdf::quantile: p exceeds mass on stated support");
    } else {
        b = std::max(a, 0.0) + 1.0;
        for (int k = 0; eval_(b) < p; ++k) {
            if (k > 2100) {
                if (p >= 1.0) return kInf;
                throw NumericError("Cdf::quantile: upper bracket expansion failed");
            }
            b = (b > 1.0) ? b * 2.0 : b + 1.0;
        }
    }
    // bisection keeps F(a) < p <= F(b); converges to inf{x : F(x) >= p}
    for (int k = 0; k < 400; ++k) {
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b)) break;
        if (eval_(m) >= p) b = m; else a = m;
        if (b - a <= 1e-12 * std::max(1.0, std::abs(b))) break;
    }
    return b;
}

Cdf Cdf::from_law(const Law& law) {
    auto hint = law.support();
    Cdf f([law](double x) { return law.cdf(x); }, hint.first, hint.second, law.name());
    f.set_quantile([law](double p) { return law.quantile(p); });
    return f;
}

Cdf Cdf::from_grid(GridMeasure m) {
    auto shared = std::make_shared<GridMeasure>(std::move(m));
    auto supp = shared->support();
    Cdf f([shared](double x) { return shared->cdf(x); }, supp.first, supp.second, "grid");
    f.set_quantile([shared](double p) { return shared->quantile(p); });
    return f;
}

Cdf dilate(const Cdf& f, double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("dilation factor must be finite and > 0");
    Cdf out([f, c](double x) { return f(x / c); }, f.support_lo() * c, f.support_hi() * c,
            f.label().empty() ? "" : f.label() + "-dilated");
    if (f.has_closed_quantile())
        out.set_quantile([f, c](double p) { return c * f.quantile(p); });
    return out;
}

} // namespace freemax
