#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/grid_measure.hpp"
#include "freemax/law.hpp"

namespace freemax {

// (a_m, b_m): b is the first moment, a the reciprocal of int x^-1 dm, with
// a = 0 when the measure charges 0 or the integral diverges (detected through
// the exact log-quadrature of the grid representation, capped at 1e12).
struct MomentsAB {
    double a = 0.0;
    double b = 0.0;
};

MomentsAB moments_ab(const Law& law);
MomentsAB moments_ab(const GridMeasure& m);

double cdf_eval(const Law& law, double x);
double cdf_eval(const GridMeasure& m, double x);
double quantile(const Law& law, double p);
double quantile(const GridMeasure& m, double p);

Law dilate(const Law& law, double c);             // closed families only
GridMeasure dilate(const GridMeasure& m, double c);

GridMeasure power_pushforward(const Law& law, double s, std::size_t n_points = 2048);
GridMeasure power_pushforward(const GridMeasure& m, double s);

// Fraction of the span covered by each geometrically graded edge block of
// make_grid.  Edge-aware mass assignment (transforms.cpp) assumes node spacing
// decays geometrically inside this window.  Kept small so the uniform middle
// retains its resolution: singular edges only ever sit at the mesh endpoints
// (atom-death boundaries), while regular square-root edges may fall anywhere.
inline constexpr double kEdgeFrac = 0.01;

// Default grid layout: geometric blocks from span*1e-9 up to kEdgeFrac of the
// span at *both* endpoints (one eighth of the nodes each) capture integrable
// singularities at the support edges; the middle is uniform.  Atom locations
// always become nodes.
std::vector<double> make_grid(double lo, double hi, std::size_t n_points);

// Sample a catalog law into the grid representation.  Laws without a usable
// density/atom decomposition (the stable families) raise UnsupportedLawError;
// laws with mass below 0 cannot live on a [0,inf) grid and do the same.
// Unbounded upper tails are cut at the 1 - 5e-10 quantile.
GridMeasure grid_from_law(const Law& law, std::size_t n_points = 2048);

} // namespace freemax
