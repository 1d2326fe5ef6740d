#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "freemax/cdf.hpp"
#include "freemax/grid_measure.hpp"
#include "freemax/verify.hpp"

namespace freemax {

// Sampled CDF table; the density column may be empty (pure-CDF exports) and
// is otherwise a centered finite difference of the cdf column.
struct CdfTable {
    std::vector<double> x, cdf, density;
};

CdfTable sample_cdf(const Cdf& f, std::size_t n = 512);

// `x,cdf,density` with a header row, full double precision
void write_cdf_table_csv(const CdfTable& t, const std::string& path);
CdfTable read_cdf_table_csv(const std::string& path);

// piecewise-linear re-ingestion; reproduces emitted node values exactly
Cdf cdf_from_table(const CdfTable& t, std::string label = "");

// `location,mass`
void write_atoms_csv(const std::vector<Atom>& atoms, const std::string& path);
std::vector<Atom> read_atoms_csv(const std::string& path);

// <stem>.csv (x,cdf,density) plus <stem>_atoms.csv
void write_measure_csv(const GridMeasure& m, const std::string& stem);

// `x,lhs,rhs,abs_diff`
void write_report_csv(const VerificationReport& r, const std::string& path);

// `index,eigenvalue`
void write_spectrum_csv(const std::vector<double>& eigenvalues, const std::string& path);

// versioned JSON summary: {schema_version, reports:[{theorem,param,sup_norm,
// tolerance,passed}], all_passed}
std::string report_summary_json(const std::vector<VerificationReport>& reports);

void write_text_file(const std::string& path, const std::string& content);

// Minimal static SVG plotting: polyline overlay with autoscaled axes.
struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

void emit_plot(const std::vector<PlotSeries>& series, const std::string& path);

// lhs/rhs overlay on top, pointwise difference panel below
void emit_report_plot(const VerificationReport& r, const std::string& path);

} // namespace freemax
