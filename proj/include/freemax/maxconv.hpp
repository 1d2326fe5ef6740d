#pragma once

#include "freemax/cdf.hpp"

namespace freemax {

// Max-convolution semigroups act pointwise on distribution-function values.
// The value maps are exposed for property tests; the Cdf-level operations
// compose them with an input CDF and keep quantiles in closed form.

double classical_max_value(double v, double t);   // v^t
double free_max_value(double v, double t);        // max(t v - (t-1), 0)
double boolean_max_value(double v, double t);     // v / (t - (t-1) v)

double lambda_vee_value(double v);                // max(0, 1 + log v), 0 -> 0
double pi_vee_value(double v);                    // exp(v - 1)
double x_vee_value(double v);                     // exp(1 - 1/v), 0 -> 0
double x_vee_inv_value(double v);                 // 1/(1 - log v), 0 -> 0

Cdf classical_max_pow(const Cdf& f, double t);    // t > 0
Cdf free_max_pow(const Cdf& f, double t);         // t >= 1
Cdf boolean_max_pow(const Cdf& f, double t);      // t > 0

Cdf lambda_vee(const Cdf& f);
// collects the mass below 0 into an atom at 0 (the empty maximum), so the
// output is supported on [0, inf) for any input CDF
Cdf pi_vee(const Cdf& f);
Cdf x_vee(const Cdf& f);
Cdf x_vee_inv(const Cdf& f);

// composite semigroup element: boolean_max_pow(free_max_pow(f, 1+t), 1/(1+t)),
// defined for t >= 0 (t == 0 is the identity)
Cdf b_t_vee(const Cdf& f, double t);

} // namespace freemax
