#include "freemax/rootfind.hpp"

#include <algorithm>
#include <cstdio>

namespace freemax {

double brent(const std::function<double(double)>& f, double a, double b,
             double fa, double fb, const RootOptions& opt) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericError("brent: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b)
                         + 0.5 * opt.xtol * std::max(1.0, std::abs(b));
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0 || std::abs(fb) <= opt.ftol)
            return b;

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            // attempt interpolation
            const double s = fb / fa;
            double p, q;
            if (a == c) {              // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {                   // inverse quadratic
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;          // fall back to bisection
            }
        } else {
            d = m; e = m;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (fb == 0.0) return b;
    }
    throw NumericError("brent: no convergence within iteration budget");
}

double solve_monotone(const std::function<double(double)>& f, double target,
                      double lo, double hi, double seed_lo, double seed_hi,
                      const RootOptions& opt) {
    auto g = [&](double x) { return f(x) - target; };

    double a = seed_lo, b = seed_hi;
    if (!(a > lo) || !(b < hi) || !(a < b))
        throw NumericError("solve_monotone: bad seed bracket");
    double ga = g(a), gb = g(b);
    const bool increasing = gb >= ga;

    // Walk the bracket toward whichever open endpoint hides the root.
    // Geometric steps in the gap coordinate so (lo,hi) asymptotes are reached
    // quickly even when they sit many orders of magnitude away.
    auto push_down = [&](double x) {
        if (std::isfinite(lo)) return lo + (x - lo) / 8.0;
        return (x < -1.0) ? x * 8.0 : x - 1.0;
    };
    auto push_up = [&](double x) {
        if (std::isfinite(hi)) return hi - (hi - x) / 8.0;
        return (x > 1.0) ? x * 8.0 : x + 1.0;
    };

    for (int k = 0; k < 600; ++k) {
        const bool root_below = increasing ? (ga > 0.0) : (ga < 0.0);
        const bool root_above = increasing ? (gb < 0.0) : (gb > 0.0);
        if (!root_below && !root_above) break;
        if (root_below) {
            b = a; gb = ga;
            a = push_down(a);
            if (!(a > lo)) throw NumericError("solve_monotone: bracket hit lower endpoint");
            ga = g(a);
        } else {
            a = b; ga = gb;
            b = push_up(b);
            if (!(b < hi)) throw NumericError("solve_monotone: bracket hit upper endpoint");
            gb = g(b);
        }
    }
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    if ((ga > 0.0) == (gb > 0.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "solve_monotone: failed to bracket target %.6g (f(%.6g)=%.6g, f(%.6g)=%.6g)",
                      target, a, ga + target, b, gb + target);
        throw NumericError(buf);
    }
    return brent(g, a, b, ga, gb, opt);
}

double differentiate(const std::function<double(double)>& f, double x, double scale) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon())
                   * std::max(scale, std::abs(x));
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace freemax
