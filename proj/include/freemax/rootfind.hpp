#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "freemax/errors.hpp"

namespace freemax {

struct RootOptions {
    double xtol = 1e-13;      // relative-to-scale tolerance on the abscissa
    double ftol = 0.0;        // optional early-out on |f|
    int max_iter = 200;
};

// Brent's method on a bracketing interval [a,b] with f(a), f(b) of opposite
// sign.  Standard inverse-quadratic/secant/bisection hybrid; the tolerance is
// interpreted as xtol * max(1, |x|).
double brent(const std::function<double(double)>& f, double a, double b,
             double fa, double fb, const RootOptions& opt = {});

inline double brent(const std::function<double(double)>& f, double a, double b,
                    const RootOptions& opt = {}) {
    return brent(f, a, b, f(a), f(b), opt);
}

// Monotone-function solver: f is strictly increasing (or decreasing) on the
// open interval (lo, hi), possibly unbounded near the ends.  Starting from an
// interior seed pair, walks geometrically toward the endpoints until a sign
// change is found, then polishes with Brent.  Used for Psi/S inversion where
// the transform blows up toward one side of its domain.
double solve_monotone(const std::function<double(double)>& f, double target,
                      double lo, double hi, double seed_lo, double seed_hi,
                      const RootOptions& opt = {});

// Derivative by central difference with adaptive step.
double differentiate(const std::function<double(double)>& f, double x, double scale = 1.0);

} // namespace freemax
