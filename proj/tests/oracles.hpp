#pragma once

// Test-side oracles, implemented independently of the library code paths they
// check.  Everything here goes through plain quadrature / bisection on first
// principles so that an error in the library's closed forms cannot hide.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// adaptive Simpson with absolute tolerance
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Marchenko-Pastur(t) bulk CDF by direct quadrature of the density
//   rho(x) = sqrt((b-x)(x-a)) / (2 pi x),  a=(1-sqrt t)^2, b=(1+sqrt t)^2,
// under x = 1 + t + 2 sqrt(t) sin(phi), which removes both square-root edges:
//   rho dx = (2 t cos^2 phi) / (pi (1 + t + 2 sqrt(t) sin phi)) dphi.
inline double mp_bulk_cdf(double t, double x) {
    const double s = std::sqrt(t);
    const double a = (1.0 - s) * (1.0 - s), b = (1.0 + s) * (1.0 + s);
    if (x <= a) return 0.0;
    if (x >= b) return std::min(1.0, t);
    const double arg = (x - 1.0 - t) / (2.0 * s);
    const double phi1 = std::asin(std::max(-1.0, std::min(1.0, arg)));
    auto integrand = [&](double p) {
        const double sn = std::sin(p);
        const double den = 1.0 + t + 2.0 * s * sn;
        // den -> 0 only at t == 1, phi == -pi/2, where the 0/0 limit is
        // (1 - sn)/pi; the factored form below reaches it continuously
        if (den < 1e-300) return (1.0 - sn) / M_PI;
        return 2.0 * t * (1.0 - sn) * (1.0 + sn) / (M_PI * den);
    };
    return integrate(integrand, -M_PI / 2.0, phi1, 1e-13);
}

// full MP CDF including the atom at 0 for t < 1
inline double mp_cdf(double t, double x) {
    const double atom = t < 1.0 ? 1.0 - t : 0.0;
    if (x < 0.0) return 0.0;
    return atom + mp_bulk_cdf(t, x);
}

// mass of a cell [x0, x1] under MP(t), continuous part only
inline double mp_cell_mass(double t, double x0, double x1) {
    return mp_bulk_cdf(t, x1) - mp_bulk_cdf(t, x0);
}

// --- Boolean power of the two-point law, by residues ------------------------
// sigma = p delta_0 + (1-p) delta_a.  F_out = (1-t) x + t / G_sigma has one
// real root per gap of the pole set; the output masses are 1 / F_out'.  Roots
// come from plain bisection and the derivative from a central difference, so
// nothing here shares code with the library's atomic path.
struct AtomOracle {
    double location, mass;
};

inline std::vector<AtomOracle> boolean_twopoint_atoms(double p, double a, double t) {
    auto g = [&](double x) { return p / x + (1.0 - p) / (x - a); };
    auto f_out = [&](double x) { return (1.0 - t) * x + t / g(x); };
    auto bisect = [](const std::function<double(double)>& fn, double lo, double hi) {
        double flo = fn(lo);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = fn(mid);
            if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; }
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    // zero of G sits strictly between the two atoms (G: +inf -> -inf there)
    const double gzero = bisect([&](double x) { return -g(x); },
                                1e-12 * a, a * (1.0 - 1e-12));

    std::vector<AtomOracle> out;
    // a root of F_out pinned at 0 (the atom at 0 never moves); its mass is
    // the residue of 1/F_out there, i.e. lim x->0 x / F_out(x)
    const double x0 = 1e-9 * a;
    out.push_back({0.0, x0 / f_out(x0)});
    // upper root: F_out runs from -inf (right of G's zero, a pole) to +inf
    double hi = a * (1.0 + t) + 10.0;
    while (f_out(hi) < 0.0) hi *= 2.0;
    const double root = bisect(f_out, gzero * (1.0 + 1e-9), hi);
    const double h = 1e-7 * std::max(1.0, root);
    const double deriv = (f_out(root + h) - f_out(root - h)) / (2.0 * h);
    out.push_back({root, 1.0 / deriv});
    return out;
}

} // namespace oracles
