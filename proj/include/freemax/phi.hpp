#pragma once

#include "freemax/cdf.hpp"
#include "freemax/grid_measure.hpp"
#include "freemax/law.hpp"
#include "freemax/stransform.hpp"

namespace freemax {

enum class StableKind { free, boolean_ };

// Closed S-transforms of the strictly positive stable families, 0 < alpha < 1:
//   free:     S(z) = (-z)^{(1-alpha)/alpha}            (a = 1, b = inf)
//   boolean:  S(z) = (-z/(1+z))^{(1-alpha)/alpha}      (a = 0, b = inf)
STransform stable_s_transform(double alpha, StableKind kind);

// Image of the limit operator: an atom at 0 of the input's zero mass plus a
// continuous part on (a, b) whose CDF is S^{-1}(1/x) + 1.
struct PhiResult {
    Cdf cdf;
    double atom_at_zero = 0.0;
    double a = 0.0;        // lower edge of the continuous part
    double b = 0.0;        // upper edge (may be +inf)
    bool closed = false;   // evaluated through a closed-form S
};

PhiResult phi(const STransform& s);
PhiResult phi(const Law& law);          // Dirac masses map to themselves
PhiResult phi(const GridMeasure& m);

// Catalog inverse of the classical-side bijection used by the composite map:
// poisson:l -> twopoint:1/(1+l),1+l and cstable:a -> bstable:a.  Anything
// else throws std::invalid_argument.
Law chi_inverse_catalog(const Law& law);

// Composite map into the classical max world: x_vee(phi(chi_inverse(law))).
Cdf psi_op(const Law& law);

} // namespace freemax
