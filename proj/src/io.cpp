#include "freemax/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace freemax {
namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing: " +
                                 std::strerror(errno));
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "' for reading: " +
                                 std::strerror(errno));
    return in;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_row(const std::string& line, std::size_t want,
                              const std::string& path) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ": bad numeric cell '" + cell + "'");
        }
    }
    if (vals.size() != want)
        throw std::invalid_argument(path + ": expected " + std::to_string(want) +
                                    " columns, got " + std::to_string(vals.size()));
    return vals;
}

} // namespace

CdfTable sample_cdf(const Cdf& f, std::size_t n) {
    if (n < 2) throw std::invalid_argument("sample_cdf: need at least 2 points");
    CdfTable t;
    t.x.reserve(n);
    t.cdf.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
        const double x = f.quantile(p);
        if (!std::isfinite(x)) continue;
        if (!t.x.empty() && x <= t.x.back()) {
            t.cdf.back() = f(x);   // collapsed quantiles (atom): keep the jump value
            continue;
        }
        t.x.push_back(x);
        t.cdf.push_back(f(x));
    }
    if (t.x.size() < 2) throw std::invalid_argument("sample_cdf: degenerate support");
    t.density.resize(t.x.size(), 0.0);
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == t.x.size() ? i : i + 1;
        const double dx = t.x[b] - t.x[a];
        t.density[i] = dx > 0.0 ? (t.cdf[b] - t.cdf[a]) / dx : 0.0;
    }
    return t;
}

void write_cdf_table_csv(const CdfTable& t, const std::string& path) {
    if (t.x.size() != t.cdf.size() ||
        (!t.density.empty() && t.density.size() != t.x.size()))
        throw std::invalid_argument("write_cdf_table_csv: ragged columns");
    auto out = open_out(path);
    out << "x,cdf,density\n";
    for (std::size_t i = 0; i < t.x.size(); ++i)
        out << num(t.x[i]) << ',' << num(t.cdf[i]) << ','
            << num(t.density.empty() ? 0.0 : t.density[i]) << '\n';
}

CdfTable read_cdf_table_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,cdf", 0) != 0)
        throw std::invalid_argument(path + ": missing x,cdf,density header");
    CdfTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto v = parse_row(line, 3, path);
        t.x.push_back(v[0]);
        t.cdf.push_back(v[1]);
        t.density.push_back(v[2]);
    }
    if (t.x.size() < 2) throw std::invalid_argument(path + ": too few rows");
    for (std::size_t i = 1; i < t.x.size(); ++i)
        if (!(t.x[i] > t.x[i - 1]) || t.cdf[i] < t.cdf[i - 1])
            throw std::invalid_argument(path + ": table is not a CDF (row " +
                                        std::to_string(i + 1) + ")");
    return t;
}

Cdf cdf_from_table(const CdfTable& t, std::string label) {
    auto xs = std::make_shared<const std::vector<double>>(t.x);
    auto fs = std::make_shared<const std::vector<double>>(t.cdf);
    auto eval = [xs, fs](double x) {
        if (x < xs->front()) return 0.0;
        if (x >= xs->back()) return std::max(fs->back(), 0.0);
        auto it = std::upper_bound(xs->begin(), xs->end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs->begin()) - 1;
        const double w = (x - (*xs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
        return (*fs)[i] + w * ((*fs)[i + 1] - (*fs)[i]);
    };
    Cdf out(eval, t.x.front(), t.x.back(), std::move(label));
    out.set_quantile([xs, fs](double p) {
        if (p <= (*fs).front()) return (*xs).front();
        if (p >= (*fs).back()) return (*xs).back();
        auto it = std::lower_bound(fs->begin(), fs->end(), p);
        std::size_t i = static_cast<std::size_t>(it - fs->begin());
        const double df = (*fs)[i] - (*fs)[i - 1];
        const double w = df > 0.0 ? (p - (*fs)[i - 1]) / df : 1.0;
        return (*xs)[i - 1] + w * ((*xs)[i] - (*xs)[i - 1]);
    });
    return out;
}

void write_atoms_csv(const std::vector<Atom>& atoms, const std::string& path) {
    auto out = open_out(path);
    out << "location,mass\n";
    for (const Atom& a : atoms) out << num(a.location) << ',' << num(a.mass) << '\n';
}

std::vector<Atom> read_atoms_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("location,mass", 0) != 0)
        throw std::invalid_argument(path + ": missing location,mass header");
    std::vector<Atom> atoms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto v = parse_row(line, 2, path);
        atoms.push_back({v[0], v[1]});
    }
    return atoms;
}

void write_measure_csv(const GridMeasure& m, const std::string& stem) {
    CdfTable t;
    t.x = m.grid();
    t.cdf = m.cdf_values();
    t.density = m.density_values();
    write_cdf_table_csv(t, stem + ".csv");
    write_atoms_csv(m.atoms(), stem + "_atoms.csv");
}

void write_report_csv(const VerificationReport& r, const std::string& path) {
    auto out = open_out(path);
    out << "x,lhs,rhs,abs_diff\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        out << num(r.grid[i]) << ',' << num(r.lhs[i]) << ',' << num(r.rhs[i])
            << ',' << num(std::abs(r.lhs[i] - r.rhs[i])) << '\n';
}

void write_spectrum_csv(const std::vector<double>& eigenvalues, const std::string& path) {
    auto out = open_out(path);
    out << "index,eigenvalue\n";
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        out << i << ',' << num(eigenvalues[i]) << '\n';
}

std::string report_summary_json(const std::vector<VerificationReport>& reports) {
    nlohmann::json j;
    j["schema_version"] = 1;
    bool all = true;
    auto& arr = j["reports"] = nlohmann::json::array();
    for (const VerificationReport& r : reports) {
        arr.push_back({{"theorem", r.theorem_id},
                       {"param", r.param},
                       {"sup_norm", r.sup_norm},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed}});
        if (!r.note.empty()) arr.back()["note"] = r.note;
        all = all && r.passed;
    }
    j["all_passed"] = all;
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

// --- SVG ---------------------------------------------------------------------

namespace {

struct Box {
    double x0, y0, w, h;   // device coordinates of the plotting area
};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) { lo = 0.0; hi = 1.0; }
        if (hi - lo < 1e-300) { lo -= 0.5; hi += 0.5; }
        const double m = 0.03 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

const char* kColors[] = {"#4477aa", "#cc3311", "#228833", "#aa3377", "#66ccee"};

void draw_series(std::ostream& out, const Box& b, const Range& rx, const Range& ry,
                 const PlotSeries& s, const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.4\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        const double px = b.x0 + b.w * (s.x[i] - rx.lo) / (rx.hi - rx.lo);
        const double py = b.y0 + b.h - b.h * (s.y[i] - ry.lo) / (ry.hi - ry.lo);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
        out << buf;
    }
    out << "\"/>\n";
}

void draw_frame(std::ostream& out, const Box& b, const Range& rx, const Range& ry) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"none\" stroke=\"#888\" stroke-width=\"0.8\"/>\n",
                  b.x0, b.y0, b.w, b.h);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"#444\">%.4g</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"#444\" "
                  "text-anchor=\"end\">%.4g</text>\n",
                  b.x0, b.y0 + b.h + 12.0, rx.lo, b.x0 + b.w, b.y0 + b.h + 12.0, rx.hi);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"#444\">%.4g</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" fill=\"#444\">%.4g</text>\n",
                  b.x0 - 42.0, b.y0 + b.h, ry.lo, b.x0 - 42.0, b.y0 + 10.0, ry.hi);
    out << buf;
}

void plot_panel(std::ostream& out, const Box& b, const std::vector<PlotSeries>& series) {
    Range rx, ry;
    for (const auto& s : series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.pad();
    ry.pad();
    draw_frame(out, b, rx, ry);
    std::size_t ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % (sizeof kColors / sizeof *kColors)];
        draw_series(out, b, rx, ry, s, color);
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                      b.x0 + 8.0, b.y0 + 14.0 + 13.0 * static_cast<double>(ci), color,
                      s.name.c_str());
        out << buf;
        ++ci;
    }
}

} // namespace

void emit_plot(const std::vector<PlotSeries>& series, const std::string& path) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("emit_plot: empty or ragged series '" + s.name + "'");
    }
    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"440\" "
           "viewBox=\"0 0 800 440\">\n<rect width=\"800\" height=\"440\" fill=\"white\"/>\n";
    plot_panel(out, {60, 20, 710, 380}, series);
    out << "</svg>\n";
}

void emit_report_plot(const VerificationReport& r, const std::string& path) {
    if (r.grid.empty()) throw std::invalid_argument("emit_report_plot: empty report grid");
    PlotSeries lhs{"lhs " + r.theorem_id, r.grid, r.lhs};
    PlotSeries rhs{"rhs " + r.param, r.grid, r.rhs};
    PlotSeries diff{"lhs - rhs", r.grid, {}};
    diff.y.resize(r.grid.size());
    for (std::size_t i = 0; i < r.grid.size(); ++i) diff.y[i] = r.lhs[i] - r.rhs[i];

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
           "viewBox=\"0 0 800 560\">\n<rect width=\"800\" height=\"560\" fill=\"white\"/>\n";
    plot_panel(out, {60, 20, 710, 350}, {lhs, rhs});
    plot_panel(out, {60, 420, 710, 110}, {diff});
    out << "</svg>\n";
}

} // namespace freemax
