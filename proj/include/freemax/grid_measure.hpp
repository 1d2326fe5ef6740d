#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "freemax/law.hpp"

namespace freemax {

// Numeric representation of a probability measure on [0, inf): finitely many
// atoms plus a continuous part stored as a piecewise-linear CDF on a strictly
// increasing grid (equivalently, piecewise-constant density between nodes).
//
// Conventions:
//  * cdf_values() are TOTAL distribution-function samples F(x_i), right
//    continuous, so an atom sitting on a grid node is included at its node.
//  * atoms strictly inside the grid range must coincide with grid nodes
//    (within 1e-9 relative); construction snaps and verifies this, so linear
//    interpolation never smears a jump across a cell.
//  * after construction total mass is exactly 1; the continuous part is
//    rescaled to 1 - sum(atom masses) provided the defect is below mass_tol.
class GridMeasure {
public:
    GridMeasure(std::vector<double> x, std::vector<double> cdf_at_x,
                std::vector<Atom> atoms, double mass_tol = 1e-9);

    static GridMeasure from_atoms(std::vector<Atom> atoms, double mass_tol = 1e-9);

    // Assemble from per-cell continuous masses; the continuous part is scaled
    // to carry exactly 1 - sum(atoms).  |scale - 1| is reported through
    // renorm_defect (the mass-conservation flag threshold is the caller's
    // business); defects above mass_tol throw NumericError.
    static GridMeasure from_segment_masses(std::vector<double> x,
                                           const std::vector<double>& cell_mass,
                                           std::vector<Atom> atoms,
                                           double mass_tol = 1e-9,
                                           double* renorm_defect = nullptr);

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& cdf_values() const { return total_cdf_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double atom_at_zero() const;

    bool has_continuous_part() const { return cont_mass_ > 0.0; }
    double continuous_mass() const { return cont_mass_; }

    double cdf(double x) const;
    double quantile(double p) const;   // exact inverse of the PL representation

    std::size_t cell_count() const { return x_.empty() ? 0 : x_.size() - 1; }
    double cell_mass(std::size_t i) const { return cont_cdf_[i + 1] - cont_cdf_[i]; }
    double cell_density(std::size_t i) const;

    // density samples at grid nodes (average of adjacent cells unless explicit
    // samples were attached via set_density_values)
    std::vector<double> density_values() const;
    void set_density_values(std::vector<double> d);

    std::pair<double, double> support() const;

    double mean() const;          // exact first moment of the representation
    // integral of 1/x; +inf when an atom sits at 0, when a cell with positive
    // mass touches 0 (the PL density makes the integral diverge exactly), or
    // when the value passes 1e12
    double inv_moment() const;

    GridMeasure dilated(double c) const;
    GridMeasure power(double s) const;

private:
    GridMeasure() = default;
    void finalize(double mass_tol, double* renorm_defect);

    std::vector<double> x_;          // strictly increasing, x_[0] >= 0
    std::vector<double> cont_cdf_;   // continuous part only, cont_cdf_[0] = 0
    std::vector<double> total_cdf_;  // cont_cdf_ + atoms up to node
    std::vector<Atom> atoms_;        // sorted by location
    std::vector<double> density_;    // optional explicit node densities
    double cont_mass_ = 0.0;
};

} // namespace freemax
