#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/law.hpp"
#include "freemax/stransform.hpp"

namespace freemax {

// One verified identity: two CDFs sampled on a common abscissa grid.
// passed <=> sup_norm <= tolerance.
struct VerificationReport {
    std::string theorem_id;        // e.g. "free-max-semigroup.closed"
    std::string param;             // rendered parameters, e.g. "mu=twopoint:0.5,2 t=2"
    std::vector<double> grid;      // abscissas
    std::vector<double> lhs, rhs;  // CDF samples along grid
    double sup_norm = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

// Sample both sides on an n-point grid quantile-spaced under rhs and record
// the sup-norm.  Quantile spacing concentrates abscissas where rhs actually
// moves, so flat stretches cannot mask a discrepancy.
VerificationReport compare_on_quantile_grid(std::string theorem_id, std::string param,
                                            const Cdf& lhs, const Cdf& rhs,
                                            double tolerance, std::size_t n = 512);

// Free additive semigroup vs free max semigroup:
//   Phi(D_{1/t}(mu^{boxplus t})) == free_max_pow(Phi(mu), t),  t >= 1.
// Two independent paths: ".closed" drives the S-transform identity, ".grid"
// recomputes the power by subordination + Stieltjes inversion.  Laws that
// cannot be gridded (heavy-tailed stables) only get the closed path.
std::vector<VerificationReport> verify_thm_free(const Law& mu, double t,
                                                std::size_t grid_n = 512,
                                                double closed_tol = 1e-8,
                                                double grid_tol = 1e-3);

// Boolean analogue:  Phi(D_{1/t}(mu^{uplus t})) == boolean_max_pow(Phi(mu), t), t > 0.
std::vector<VerificationReport> verify_thm_boolean(const Law& mu, double t,
                                                   std::size_t grid_n = 512,
                                                   double closed_tol = 1e-8,
                                                   double grid_tol = 1e-3);

// Composite semigroup:  Phi(B_t(mu)) == b_t_vee(Phi(mu), t),  t >= 0, where
// B_t = boolean power 1/(1+t) of the free power 1+t.
std::vector<VerificationReport> verify_thm_bn(const Law& mu, double t,
                                              std::size_t grid_n = 512,
                                              double closed_tol = 1e-8,
                                              double grid_tol = 1e-3);
// Closed-only variant for measures given directly by an S-transform
// (the positive stable pair).
std::vector<VerificationReport> verify_thm_bn(const STransform& s, double t,
                                              std::size_t grid_n = 512,
                                              double closed_tol = 1e-8);

// Classical semigroup through the composite map, on the Poisson catalog:
//   dilate(psi_op(Poisson(lambda t)), 1/t) == classical_max_pow(psi_op(Poisson(lambda)), t).
// Both sides are closed-form; the atom at 0 must match as (e^-lambda)^t.
VerificationReport verify_thm_classical(double lambda, double t,
                                        std::size_t grid_n = 512,
                                        double tol = 1e-10);

// Free multiplicative power identity:
//   Phi(mu^{boxtimes n})([0, x^n]) == Phi(mu)([0, x]),  integer n >= 1.
VerificationReport verify_mult_identity(const Law& mu, int n,
                                        std::size_t grid_n = 512,
                                        double tol = 1e-3);

// Pointwise prelimit value maps for the limit propositions.
double free_prelimit_value(double v, double n);     // max(n v^{1/n} - (n-1), 0)
double boolean_prelimit_value(double v, double n);  // v^{1/n} / (n - (n-1) v^{1/n})

// Prelimit convergence:  free prelimit -> lambda_vee(f), boolean prelimit ->
// x_vee_inv(f), with sup-norms decreasing along n_list.  Returns one report
// per (kind, n) plus one ".monotone" summary per kind whose sup_norm is the
// largest adjacent increase of the per-n sup-norms (<= 0 means decreasing).
std::vector<VerificationReport> verify_limit_props(const Cdf& f,
                                                   const std::vector<long>& n_list,
                                                   std::size_t grid_n = 512,
                                                   double tol = 1e-2);

} // namespace freemax
