// CSV/JSON/SVG emission, re-ingestion, and the command-line front end.
// The CLI binary path arrives through the FREEMAX_CLI_PATH compile definition.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "freemax/io.hpp"
#include "freemax/law.hpp"
#include "freemax/measure_ops.hpp"
#include "freemax/verify.hpp"

using namespace freemax;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("freemax_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str(const std::string& leaf = "") const {
        return (leaf.empty() ? path : path / leaf).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

#ifdef FREEMAX_CLI_PATH
int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        env + (env.empty() ? "" : " ") + FREEMAX_CLI_PATH + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

} // namespace

TEST_CASE("cdf table csv round trip") {
    TempDir tmp;
    Cdf f = Cdf::from_law(Law(Dagum{1.0}));
    CdfTable t = sample_cdf(f, 128);
    REQUIRE(t.x.size() == 128);
    REQUIRE(t.cdf.size() == 128);
    const std::string path = tmp.str("table.csv");
    write_cdf_table_csv(t, path);

    CdfTable back = read_cdf_table_csv(path);
    REQUIRE(back.x.size() == t.x.size());
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        CHECK(back.x[i] == doctest::Approx(t.x[i]).epsilon(1e-12));
        CHECK(back.cdf[i] == doctest::Approx(t.cdf[i]).epsilon(1e-12));
    }

    Cdf g = cdf_from_table(back, "reread");
    for (std::size_t i = 0; i < t.x.size(); ++i)
        CHECK(g(t.x[i]) == doctest::Approx(t.cdf[i]).epsilon(1e-12));
    CHECK(g.label() == "reread");
}

TEST_CASE("atoms csv round trip") {
    TempDir tmp;
    std::vector<Atom> atoms = {{0.0, 1.0 / 3.0}, {3.0, 2.0 / 3.0}};
    const std::string path = tmp.str("atoms.csv");
    write_atoms_csv(atoms, path);
    auto back = read_atoms_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].location == doctest::Approx(0.0));
    CHECK(back[0].mass == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(back[1].location == doctest::Approx(3.0));
    CHECK(back[1].mass == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("measure csv pair") {
    TempDir tmp;
    GridMeasure m = grid_from_law(Law(MarchenkoPastur{0.5}), 256);
    write_measure_csv(m, tmp.str("mp"));
    CHECK(fs::exists(tmp.str("mp.csv")));
    CHECK(fs::exists(tmp.str("mp_atoms.csv")));
    const std::string head = slurp(tmp.str("mp.csv")).substr(0, 14);
    CHECK(head == "x,cdf,density\n");
    auto atoms = read_atoms_csv(tmp.str("mp_atoms.csv"));
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].mass == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("report csv and json summary") {
    TempDir tmp;
    VerificationReport r = verify_thm_classical(1.0, 2.0, 64);
    write_report_csv(r, tmp.str("rep.csv"));
    const std::string text = slurp(tmp.str("rep.csv"));
    CHECK(text.substr(0, 19) == "x,lhs,rhs,abs_diff\n");
    CHECK(count_lines(text) == 65);

    const std::string json_text = report_summary_json({r});
    auto j = nlohmann::json::parse(json_text);
    CHECK(j["schema_version"] == 1);
    CHECK(j["all_passed"] == true);
    REQUIRE(j["reports"].size() == 1);
    CHECK(j["reports"][0]["theorem"] == "classical-max-semigroup");
    CHECK(j["reports"][0]["passed"] == true);
    CHECK(j["reports"][0]["sup_norm"].is_number());
    CHECK(j["reports"][0]["tolerance"].is_number());
}

TEST_CASE("spectrum csv") {
    TempDir tmp;
    write_spectrum_csv({0.5, 1.25, 2.0}, tmp.str("spec.csv"));
    const std::string text = slurp(tmp.str("spec.csv"));
    CHECK(text.substr(0, 17) == "index,eigenvalue\n");
    CHECK(count_lines(text) == 4);
}

TEST_CASE("svg emission") {
    TempDir tmp;
    CHECK_THROWS_AS(emit_plot({}, tmp.str("x.svg")), std::invalid_argument);
    CHECK_THROWS_AS(emit_plot({{"s", {}, {}}}, tmp.str("x.svg")),
                    std::invalid_argument);

    emit_plot({{"line", {0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}}}, tmp.str("ok.svg"));
    const std::string svg = slurp(tmp.str("ok.svg"));
    CHECK(svg.substr(0, 4) == "<svg");
    CHECK(svg.find("polyline") != std::string::npos);

    VerificationReport r = verify_thm_classical(1.0, 2.0, 64);
    emit_report_plot(r, tmp.str("rep.svg"));
    CHECK(slurp(tmp.str("rep.svg")).find("</svg>") != std::string::npos);
}

#ifdef FREEMAX_CLI_PATH

TEST_CASE("cli: limit operator of the free poisson is the identity cdf") {
    TempDir tmp;
    CHECK(run_cli("phi --law mp --out " + tmp.str()) == 0);
    CdfTable t = read_cdf_table_csv(tmp.str("phi_mp_1.csv"));
    double sup = 0.0;
    for (std::size_t i = 0; i < t.x.size(); ++i)
        if (t.x[i] > 1e-9 && t.x[i] < 1.0 - 1e-9)
            sup = std::max(sup, std::abs(t.cdf[i] - t.x[i]));
    CHECK(sup < 1e-6);

    auto j = nlohmann::json::parse(slurp(tmp.str("phi_mp_1.json")));
    CHECK(j["schema_version"] == 1);
    CHECK(j["law"] == "mp:1");
    CHECK(j["closed_form"] == true);
}

TEST_CASE("cli: verify exit codes and artifacts") {
    TempDir tmp;
    CHECK(run_cli("verify --theorem free --law twopoint:0.5,2 --t 2 --out " +
                  tmp.str()) == 0);
    auto j = nlohmann::json::parse(slurp(tmp.str("summary.json")));
    CHECK(j["all_passed"] == true);
    CHECK(j["reports"].size() == 2);
    CHECK(!fs::exists(tmp.str("error.json")));

    // an unreachable tolerance flips the exit code and leaves a record
    TempDir tmp2;
    CHECK(run_cli("verify --theorem free --law twopoint:0.5,2 --t 2 "
                  "--tolerance 1e-20 --out " + tmp2.str()) == 1);
    auto err = nlohmann::json::parse(slurp(tmp2.str("error.json")));
    CHECK(err["error"]["exit_code"] == 1);
    CHECK(err["error"]["type"] == "verification");
}

TEST_CASE("cli: malformed input exits 2 with a record") {
    TempDir tmp;
    CHECK(run_cli("phi --law bogus --out " + tmp.str()) == 2);
    auto err = nlohmann::json::parse(slurp(tmp.str("error.json")));
    CHECK(err["error"]["exit_code"] == 2);

    CHECK(run_cli("phi --law mp --no-such-flag --out " + tmp.str()) == 2);
    CHECK(run_cli("transform --law gumbel --op free --t 2 --out " + tmp.str()) == 2);
    CHECK(run_cli("verify --theorem nosuch --out " + tmp.str()) == 2);
    CHECK(run_cli("phi --law mp --grid 8 --out " + tmp.str()) == 2);
}

TEST_CASE("cli: environment override for the output directory") {
    TempDir tmp;
    CHECK(run_cli("phi --law uniform", "FREEMAX_OUT=" + tmp.str()) == 0);
    CHECK(fs::exists(tmp.str("phi_uniform.csv")));
}

TEST_CASE("cli: simulate writes spectrum and summary") {
    TempDir tmp;
    CHECK(run_cli("simulate --ensemble wishart --N 64 --seed 5 --out " + tmp.str()) == 0);
    auto j = nlohmann::json::parse(slurp(tmp.str("wishart_N64_n1_seed5.json")));
    CHECK(j["ensemble"] == "wishart");
    CHECK(j["N"] == 64);
    CHECK(j["n"] == 1);
    CHECK(j["seed"] == 5);
    CHECK(j["target"] == "mp:1");
    CHECK(j["ks"].is_number());
    CHECK(j["ks"] < 0.25);
    const std::string csv = slurp(tmp.str("wishart_N64_n1_seed5.csv"));
    CHECK(count_lines(csv) == 65);
}

TEST_CASE("cli: svg flag produces plots") {
    TempDir tmp;
    CHECK(run_cli("verify --theorem classical --lambda 1 --t 2 --svg --out " +
                  tmp.str()) == 0);
    bool found = false;
    for (const auto& e : fs::directory_iterator(tmp.path))
        if (e.path().extension() == ".svg") found = true;
    CHECK(found);
}

#endif // FREEMAX_CLI_PATH
