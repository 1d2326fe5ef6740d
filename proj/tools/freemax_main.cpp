// freemax command-line front end: catalog inspection, transform evaluation,
// semigroup verification suites, prelimit checks, and Monte Carlo spectra.
//
// Exit codes: 0 success, 1 a verification report failed, 2 bad input
// (unknown flags, malformed law spec, unsupported operation), 3 numeric
// failure inside an iterative scheme.  Every nonzero exit also leaves an
// error.json record in the output directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "freemax/errors.hpp"
#include "freemax/io.hpp"
#include "freemax/law.hpp"
#include "freemax/maxconv.hpp"
#include "freemax/measure_ops.hpp"
#include "freemax/phi.hpp"
#include "freemax/randmat.hpp"
#include "freemax/stransform.hpp"
#include "freemax/transforms.hpp"
#include "freemax/verify.hpp"

namespace fs = std::filesystem;
using namespace freemax;

namespace {

struct RunConfig {
    std::string command;
    std::string law_spec;
    std::string op;            // transform sub-operation
    std::string kind;          // maxpow kind
    std::string theorem;       // verify target
    std::string ensemble;      // simulate target
    double t = 2.0;
    int n = 2;                 // mult power / product factors
    double lambda = 1.0;
    std::size_t grid_points = 512;
    double tolerance = -1.0;   // < 0: use the per-path defaults
    std::uint64_t seed = 1;
    int dim = 256;             // simulate matrix size
    std::string n_list = "100,1000,10000";
    std::string output_dir = "freemax_out";
    bool emit_svg = false;
};

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == ':' || c == ',' || c == '/' || c == ' ' || c == '=') out.push_back('_');
        else out.push_back(c);
    }
    return out;
}

// FREEMAX_OUT wins over the flag so wrapper scripts can redirect every run
std::string resolve_out_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("FREEMAX_OUT"); env && *env) return env;
    return flag_value;
}

void write_error_record(const std::string& dir, const std::string& type,
                        const std::string& message, int exit_code) {
    try {
        fs::create_directories(dir);
        nlohmann::json j;
        j["schema_version"] = 1;
        j["error"] = {{"type", type}, {"message", message}, {"exit_code", exit_code}};
        write_text_file(dir + "/error.json", j.dump(2) + "\n");
    } catch (...) {
        // the record is best-effort; the exit code still reports the failure
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void emit_cdf_artifacts(const Cdf& f, double atom_at_zero, const std::string& stem,
                        const RunConfig& cfg, nlohmann::json meta) {
    CdfTable tab = sample_cdf(f, cfg.grid_points);
    write_cdf_table_csv(tab, stem + ".csv");
    if (atom_at_zero > 0.0) write_atoms_csv({{0.0, atom_at_zero}}, stem + "_atoms.csv");
    meta["schema_version"] = 1;
    meta["csv"] = stem + ".csv";
    write_json(stem + ".json", meta);
    if (cfg.emit_svg) {
        PlotSeries s{f.label().empty() ? "cdf" : f.label(), tab.x, tab.cdf};
        emit_plot({s}, stem + ".svg");
    }
    std::cout << "wrote " << stem << ".csv\n";
}

int cmd_catalog() {
    for (const Law& law : Law::catalog()) std::cout << law.describe() << "\n";
    std::cout << "\nparametric spellings: mp:<rate> dirac:<a> twopoint:<p>,<a> "
                 "poisson:<l> fstable:<a> bstable:<a> cstable:<a> frechet:<a> "
                 "weibull:<a> pareto:<a> beta:<a> dagum:<a> mcp:<base>\n";
    return 0;
}

int cmd_phi(const RunConfig& cfg, const std::string& dir) {
    Law law = Law::parse(cfg.law_spec);
    PhiResult p = phi(law);
    const std::string stem = dir + "/phi_" + sanitize(law.name());
    nlohmann::json meta = {{"command", "phi"},
                           {"law", law.name()},
                           {"atom_at_zero", p.atom_at_zero},
                           {"a", p.a},
                           {"b", p.b},
                           {"closed_form", p.closed}};
    emit_cdf_artifacts(p.cdf, p.atom_at_zero, stem, cfg, std::move(meta));
    return 0;
}

int cmd_psi(const RunConfig& cfg, const std::string& dir) {
    Law law = Law::parse(cfg.law_spec);
    Cdf f = psi_op(law);
    const std::string stem = dir + "/psi_" + sanitize(law.name());
    emit_cdf_artifacts(f, f(0.0), stem, cfg,
                       {{"command", "psi"}, {"law", law.name()}});
    return 0;
}

void write_s_table(const STransform& s, const std::string& stem,
                   const RunConfig& cfg) {
    const double lo = s.domain_lo();
    std::string csv = "z,s\n";
    std::vector<double> zs, vals;
    for (std::size_t i = 1; i < cfg.grid_points; ++i) {
        const double z = lo + (0.0 - lo) * static_cast<double>(i) /
                                  static_cast<double>(cfg.grid_points);
        char line[64];
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", z, s(z));
        csv += line;
        zs.push_back(z);
        vals.push_back(s(z));
    }
    write_text_file(stem + ".csv", csv);
    if (cfg.emit_svg) emit_plot({{s.label().empty() ? "s" : s.label(), zs, vals}}, stem + ".svg");
    std::cout << "wrote " << stem << ".csv\n";
}

int cmd_transform(const RunConfig& cfg, const std::string& dir) {
    Law law = Law::parse(cfg.law_spec);
    const std::size_t n_points = std::max<std::size_t>(2048, cfg.grid_points);
    ConvolutionStats stats;
    const std::string tag = sanitize(law.name());

    if (cfg.op == "s") {
        write_s_table(s_transform(law), dir + "/s_" + tag, cfg);
        return 0;
    }
    if (cfg.op == "mult") {
        STransform s = free_mult_power_s(s_transform(law), cfg.n);
        write_s_table(s, dir + "/s_mult" + std::to_string(cfg.n) + "_" + tag, cfg);
        return 0;
    }

    GridMeasure out = [&] {
        if (cfg.op == "free") return free_add_power(law, cfg.t, n_points, &stats);
        if (cfg.op == "boolean") return boolean_add_power(law, cfg.t, n_points, &stats);
        if (cfg.op == "bt") return b_t_operator(law, cfg.t, n_points, &stats);
        throw std::invalid_argument("unknown transform op '" + cfg.op + "'");
    }();

    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%g", cfg.t);
    const std::string stem = dir + "/" + cfg.op + "_t" + tbuf + "_" + tag;
    write_measure_csv(out, stem);
    nlohmann::json meta = {{"schema_version", 1},
                           {"command", "transform"},
                           {"op", cfg.op},
                           {"law", law.name()},
                           {"t", cfg.t},
                           {"atom_at_zero", out.atom_at_zero()},
                           {"mass_renorm_defect", stats.mass_renorm_defect},
                           {"fixed_point_iters", stats.max_fixed_point_iters}};
    write_json(stem + ".json", meta);
    if (cfg.emit_svg) {
        CdfTable tab = sample_cdf(Cdf::from_grid(out), cfg.grid_points);
        emit_plot({{cfg.op, tab.x, tab.cdf}}, stem + ".svg");
    }
    std::cout << "wrote " << stem << ".csv\n";
    return 0;
}

int cmd_maxpow(const RunConfig& cfg, const std::string& dir) {
    Law law = Law::parse(cfg.law_spec);
    Cdf f = Cdf::from_law(law);
    Cdf out = [&] {
        if (cfg.kind == "classical") return classical_max_pow(f, cfg.t);
        if (cfg.kind == "free") return free_max_pow(f, cfg.t);
        if (cfg.kind == "boolean") return boolean_max_pow(f, cfg.t);
        throw std::invalid_argument("unknown max power kind '" + cfg.kind + "'");
    }();
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%g", cfg.t);
    const std::string stem =
        dir + "/maxpow_" + cfg.kind + "_t" + tbuf + "_" + sanitize(law.name());
    emit_cdf_artifacts(out, out(0.0), stem, cfg,
                       {{"command", "maxpow"},
                        {"kind", cfg.kind},
                        {"law", law.name()},
                        {"t", cfg.t}});
    return 0;
}

int finish_reports(const std::vector<VerificationReport>& reports,
                   const RunConfig& cfg, const std::string& dir) {
    bool all = true;
    for (const VerificationReport& r : reports) {
        const std::string stem = dir + "/" + sanitize(r.theorem_id + "_" + r.param);
        write_report_csv(r, stem + ".csv");
        if (cfg.emit_svg) emit_report_plot(r, stem + ".svg");
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.theorem_id << "  "
                  << r.param << "  sup=" << r.sup_norm << " tol=" << r.tolerance
                  << "\n";
        all = all && r.passed;
    }
    write_text_file(dir + "/summary.json", report_summary_json(reports));
    std::cout << "wrote " << dir << "/summary.json\n";
    if (!all)
        write_error_record(dir, "verification",
                           "one or more reports exceeded tolerance", 1);
    return all ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, const std::string& dir) {
    std::vector<VerificationReport> reports;
    const double closed_tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-8;
    const double grid_tol = cfg.tolerance > 0.0 ? cfg.tolerance : 1e-3;

    if (cfg.theorem == "free") {
        reports = verify_thm_free(Law::parse(cfg.law_spec), cfg.t, cfg.grid_points,
                                  closed_tol, grid_tol);
    } else if (cfg.theorem == "boolean") {
        reports = verify_thm_boolean(Law::parse(cfg.law_spec), cfg.t, cfg.grid_points,
                                     closed_tol, grid_tol);
    } else if (cfg.theorem == "bn") {
        Law law = Law::parse(cfg.law_spec);
        if (law.is<BooleanStablePos>()) {
            // stable laws cannot be gridded; drive the closed pair directly
            reports = verify_thm_bn(
                stable_s_transform(law.as<BooleanStablePos>().alpha, StableKind::boolean_),
                cfg.t, cfg.grid_points, closed_tol);
        } else {
            reports = verify_thm_bn(law, cfg.t, cfg.grid_points, closed_tol, grid_tol);
        }
    } else if (cfg.theorem == "classical") {
        reports.push_back(verify_thm_classical(
            cfg.lambda, cfg.t, cfg.grid_points,
            cfg.tolerance > 0.0 ? cfg.tolerance : 1e-10));
    } else if (cfg.theorem == "mult") {
        reports.push_back(verify_mult_identity(Law::parse(cfg.law_spec), cfg.n,
                                               cfg.grid_points, grid_tol));
    } else {
        throw std::invalid_argument("unknown theorem '" + cfg.theorem + "'");
    }
    return finish_reports(reports, cfg, dir);
}

int cmd_limits(const RunConfig& cfg, const std::string& dir) {
    Law law = Law::parse(cfg.law_spec);
    std::vector<long> ns;
    std::string token;
    for (char c : cfg.n_list + ",") {
        if (c == ',') {
            if (!token.empty()) ns.push_back(std::stol(token));
            token.clear();
        } else {
            token.push_back(c);
        }
    }
    if (ns.empty()) throw std::invalid_argument("--n-list needs at least one entry");
    auto reports = verify_limit_props(Cdf::from_law(law), ns, cfg.grid_points,
                                      cfg.tolerance > 0.0 ? cfg.tolerance : 1e-2);
    return finish_reports(reports, cfg, dir);
}

int cmd_simulate(const RunConfig& cfg, const std::string& dir) {
    SpectrumSample sample;
    Cdf target = [&] {
        if (cfg.ensemble == "wishart") {
            sample = sample_wishart_spectrum(cfg.dim, cfg.seed);
            return Cdf::from_law(Law(MarchenkoPastur{1.0}));
        }
        if (cfg.ensemble == "ginibre") {
            sample = ginibre_product_spectrum(cfg.dim, cfg.n, cfg.seed);
            return Cdf::from_law(Law(Uniform01{}));
        }
        throw std::invalid_argument("unknown ensemble '" + cfg.ensemble + "'");
    }();
    const double ks = ks_distance(sample, target);

    const std::string stem = dir + "/" + cfg.ensemble + "_N" + std::to_string(cfg.dim) +
                             "_n" + std::to_string(sample.n_factors) + "_seed" +
                             std::to_string(cfg.seed);
    write_spectrum_csv(sample.eigenvalues, stem + ".csv");
    nlohmann::json j = {{"schema_version", 1},
                        {"ensemble", sample.ensemble},
                        {"N", sample.dim},
                        {"n", sample.n_factors},
                        {"seed", sample.seed},
                        {"ks", ks},
                        {"target", target.label()}};
    write_json(stem + ".json", j);
    std::cout << "ks = " << ks << "  (target " << target.label() << ")\n"
              << "wrote " << stem << ".csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"freemax: transform calculus for measures on [0,inf) -- "
                 "semigroup powers, max-convolutions, the spectral limit "
                 "operator, and Monte Carlo spectra"};
    app.require_subcommand(1);
    app.footer("Environment:\n  FREEMAX_OUT   overrides --out for every command\n\n"
               "Law grammar: mp | mp:2 | uniform | dirac:1 | twopoint:0.5,2 | "
               "poisson:1 |\n  fstable:0.5 | bstable:0.5 | cstable:0.5 | gumbel | "
               "frechet:1 | weibull:2 |\n  exponential | pareto:1 | beta:1 | dagum:1 "
               "| mcp:<base>   (see 'catalog')");

    auto add_common = [&](CLI::App* sub, bool with_grid = true) {
        sub->add_option("--out", cfg.output_dir,
                        "output directory (FREEMAX_OUT env overrides)")
            ->capture_default_str();
        if (with_grid)
            sub->add_option("--grid", cfg.grid_points, "sample grid size")
                ->check(CLI::Range(std::size_t{64}, std::size_t{1} << 20))
                ->capture_default_str();
        sub->add_flag("--svg", cfg.emit_svg, "also emit SVG plots");
    };

    app.add_subcommand("catalog", "list the law catalog and grammar");

    CLI::App* sub_phi = app.add_subcommand("phi", "limit operator of a law");
    sub_phi->add_option("--law", cfg.law_spec, "law spec")->required();
    add_common(sub_phi);

    CLI::App* sub_psi =
        app.add_subcommand("psi", "composite classical-side map (poisson/cstable)");
    sub_psi->add_option("--law", cfg.law_spec, "law spec")->required();
    add_common(sub_psi);

    CLI::App* sub_tr = app.add_subcommand("transform", "convolution powers and s-transforms");
    sub_tr->add_option("--law", cfg.law_spec, "law spec")->required();
    sub_tr->add_option("--op", cfg.op, "free | boolean | bt | mult | s")
        ->required()
        ->check(CLI::IsMember({"free", "boolean", "bt", "mult", "s"}));
    sub_tr->add_option("--t", cfg.t, "power/semigroup parameter")->capture_default_str();
    sub_tr->add_option("--n", cfg.n, "multiplicative power")->capture_default_str();
    add_common(sub_tr);

    CLI::App* sub_mx = app.add_subcommand("maxpow", "max-convolution power of a cdf");
    sub_mx->add_option("--law", cfg.law_spec, "law spec")->required();
    sub_mx->add_option("--kind", cfg.kind, "classical | free | boolean")
        ->required()
        ->check(CLI::IsMember({"classical", "free", "boolean"}));
    sub_mx->add_option("--t", cfg.t, "power")->capture_default_str();
    add_common(sub_mx);

    CLI::App* sub_vf = app.add_subcommand("verify", "semigroup identity checks");
    sub_vf->add_option("--theorem", cfg.theorem,
                       "free | boolean | bn | classical | mult")
        ->required()
        ->check(CLI::IsMember({"free", "boolean", "bn", "classical", "mult"}));
    sub_vf->add_option("--law", cfg.law_spec, "law spec (not used by classical)");
    sub_vf->add_option("--t", cfg.t, "semigroup parameter")->capture_default_str();
    sub_vf->add_option("--n", cfg.n, "multiplicative power (mult)")->capture_default_str();
    sub_vf->add_option("--lambda", cfg.lambda, "poisson mean (classical)")
        ->capture_default_str();
    sub_vf->add_option("--tolerance", cfg.tolerance,
                       "override the pass tolerance (default 1e-8 closed / 1e-3 grid)");
    add_common(sub_vf);

    CLI::App* sub_lm = app.add_subcommand("limits", "prelimit convergence checks");
    sub_lm->add_option("--law", cfg.law_spec, "law spec for the target cdf")->required();
    sub_lm->add_option("--n-list", cfg.n_list, "comma-separated prelimit sizes")
        ->capture_default_str();
    sub_lm->add_option("--tolerance", cfg.tolerance, "sup-norm tolerance at the largest n");
    add_common(sub_lm);

    CLI::App* sub_sm = app.add_subcommand("simulate", "random-matrix spectra");
    sub_sm->add_option("--ensemble", cfg.ensemble, "wishart | ginibre")
        ->required()
        ->check(CLI::IsMember({"wishart", "ginibre"}));
    sub_sm->add_option("--N", cfg.dim, "matrix size")->check(CLI::Range(2, 1 << 14))
        ->capture_default_str();
    sub_sm->add_option("--n", cfg.n, "product factors (ginibre)")
        ->check(CLI::Range(1, 1 << 12))->capture_default_str();
    sub_sm->add_option("--seed", cfg.seed, "rng seed")->capture_default_str();
    add_common(sub_sm, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;   // --help / --version
        write_error_record(resolve_out_dir(cfg.output_dir), "parse", e.what(), 2);
        return 2;
    }

    const std::string dir = resolve_out_dir(cfg.output_dir);
    try {
        if (app.got_subcommand("catalog")) return cmd_catalog();
        fs::create_directories(dir);
        if (app.got_subcommand(sub_phi)) return cmd_phi(cfg, dir);
        if (app.got_subcommand(sub_psi)) return cmd_psi(cfg, dir);
        if (app.got_subcommand(sub_tr)) return cmd_transform(cfg, dir);
        if (app.got_subcommand(sub_mx)) return cmd_maxpow(cfg, dir);
        if (app.got_subcommand(sub_vf)) return cmd_verify(cfg, dir);
        if (app.got_subcommand(sub_lm)) return cmd_limits(cfg, dir);
        if (app.got_subcommand(sub_sm)) return cmd_simulate(cfg, dir);
        std::cerr << "no command\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        write_error_record(dir, "numeric", e.what(), 3);
        return 3;
    } catch (const UnsupportedLawError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        write_error_record(dir, "unsupported", e.what(), 2);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        write_error_record(dir, "invalid-argument", e.what(), 2);
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        write_error_record(dir, "domain", e.what(), 2);
        return 2;
    }
}
