#include "freemax/law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "freemax/rootfind.hpp"

namespace freemax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-16;   // discrete-tail truncation

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

[[noreturn]] void stable_unsupported(const char* what) {
    throw UnsupportedLawError(std::string("positive stable laws expose no closed-form ") + what
                              + "; they are handled through their S-transforms");
}

// --- Marchenko-Pastur ---------------------------------------------------------
// Edges of the bulk for rate t and the closed CDF.  The CDF comes from the
// substitution x = 1 + t + 2 sqrt(t) sin(phi), which turns the semicircle-type
// integrand into a rational function of sin(phi) with the antiderivative below.
struct MpGeom {
    double t, lo, hi, atom0;
};

MpGeom mp_geom(double t) {
    const double s = std::sqrt(t);
    return {t, (1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s), std::max(1.0 - t, 0.0)};
}

double mp_antiderivative(double t, double phi) {
    const double s = std::sqrt(t);
    double val = s * std::cos(phi) + 0.5 * (1.0 + t) * phi;
    if (t != 1.0) {
        const double d = std::abs(1.0 - t);
        val -= d * std::atan(((1.0 + t) * std::tan(0.5 * phi) + 2.0 * s) / d);
    }
    return val / M_PI;
}

double mp_cdf(double t, double y) {
    const MpGeom g = mp_geom(t);
    if (y < 0.0) return 0.0;
    if (y <= g.lo) return g.atom0;
    if (y >= g.hi) return 1.0;
    const double arg = std::clamp((y - 1.0 - t) / (2.0 * std::sqrt(t)), -1.0, 1.0);
    const double phi = std::asin(arg);
    return g.atom0 + mp_antiderivative(t, phi) - mp_antiderivative(t, -0.5 * M_PI);
}

double mp_density(double t, double x) {
    const MpGeom g = mp_geom(t);
    if (x <= g.lo || x >= g.hi || x <= 0.0) return 0.0;
    const double disc = 4.0 * t - (x - 1.0 - t) * (x - 1.0 - t);
    return disc > 0.0 ? std::sqrt(disc) / (2.0 * M_PI * x) : 0.0;
}

// --- Poisson ------------------------------------------------------------------
std::vector<Atom> poisson_atoms(double lambda) {
    std::vector<Atom> out;
    double pk = std::exp(-lambda);   // P(X = 0)
    double cum = 0.0;
    for (int k = 0; k < 4000; ++k) {
        if (1.0 - cum <= kTailMass && k > lambda) {
            break;
        }
        out.push_back({static_cast<double>(k), pk});
        cum += pk;
        pk *= lambda / (k + 1);
    }
    // fold the truncated tail into the last atom so the masses sum to 1
    if (!out.empty()) out.back().mass += 1.0 - cum;
    return out;
}

} // namespace

Law::Law(LawVariant v) : v_(std::move(v)) {
    std::visit([](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            require(law.location >= 0.0 && std::isfinite(law.location),
                    "dirac: location must be finite and >= 0");
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            require(law.rate > 0.0 && std::isfinite(law.rate), "mp: rate must be > 0");
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            require(law.mass_at_zero >= 0.0 && law.mass_at_zero <= 1.0,
                    "twopoint: mass at zero must lie in [0,1]");
            require(law.location > 0.0 && std::isfinite(law.location),
                    "twopoint: location must be > 0");
        } else if constexpr (std::is_same_v<T, Poisson>) {
            require(law.lambda > 0.0 && std::isfinite(law.lambda), "poisson: lambda must be > 0");
        } else if constexpr (std::is_same_v<T, FreeStablePos> ||
                             std::is_same_v<T, BooleanStablePos> ||
                             std::is_same_v<T, ClassicalStablePos>) {
            require(law.alpha > 0.0 && law.alpha < 1.0, "stable: alpha must lie in (0,1)");
        } else if constexpr (std::is_same_v<T, Frechet> || std::is_same_v<T, Weibull> ||
                             std::is_same_v<T, Pareto> || std::is_same_v<T, BetaLaw> ||
                             std::is_same_v<T, Dagum>) {
            require(law.alpha > 0.0 && std::isfinite(law.alpha), "alpha must be > 0");
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            require(law.base != nullptr, "mcp: base law missing");
        }
    }, v_);
}

double Law::cdf(double x) const {
    return std::visit([&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return x >= law.location ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return std::clamp(x, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            return mp_cdf(law.rate, x);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            if (x < 0.0) return 0.0;
            return x < law.location ? law.mass_at_zero : 1.0;
        } else if constexpr (std::is_same_v<T, Poisson>) {
            if (x < 0.0) return 0.0;
            double c = 0.0;
            for (const Atom& a : poisson_atoms(law.lambda)) {
                if (a.location > x) break;
                c += a.mass;
            }
            return c;
        } else if constexpr (std::is_same_v<T, FreeStablePos> ||
                             std::is_same_v<T, BooleanStablePos> ||
                             std::is_same_v<T, ClassicalStablePos>) {
            stable_unsupported("distribution function");
        } else if constexpr (std::is_same_v<T, Gumbel>) {
            return std::exp(-std::exp(-x));
        } else if constexpr (std::is_same_v<T, Frechet>) {
            return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -law.alpha));
        } else if constexpr (std::is_same_v<T, Weibull>) {
            return x >= 0.0 ? 1.0 : std::exp(-std::pow(-x, law.alpha));
        } else if constexpr (std::is_same_v<T, Exponential>) {
            return x <= 0.0 ? 0.0 : -std::expm1(-x);
        } else if constexpr (std::is_same_v<T, Pareto>) {
            return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -law.alpha);
        } else if constexpr (std::is_same_v<T, BetaLaw>) {
            if (x >= 0.0) return 1.0;
            if (x <= -1.0) return 0.0;
            return 1.0 - std::pow(-x, law.alpha);
        } else if constexpr (std::is_same_v<T, Dagum>) {
            return x <= 0.0 ? 0.0 : 1.0 / (1.0 + std::pow(x, -law.alpha));
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            // empty maximum sits at 0, so mass below 0 collapses into an atom there
            if (x < 0.0) return 0.0;
            return std::exp(law.base->cdf(x) - 1.0);
        }
    }, v_);
}

bool Law::has_density() const {
    return std::visit([](const auto& law) -> bool {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac> || std::is_same_v<T, TwoPoint> ||
                      std::is_same_v<T, Poisson>) {
            return false;
        } else if constexpr (std::is_same_v<T, FreeStablePos> ||
                             std::is_same_v<T, BooleanStablePos> ||
                             std::is_same_v<T, ClassicalStablePos>) {
            return false;
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            return law.base->has_density();
        } else {
            (void)law;
            return true;
        }
    }, v_);
}

double Law::density(double x) const {
    return std::visit([&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Uniform01>) {
            return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            return mp_density(law.rate, x);
        } else if constexpr (std::is_same_v<T, Gumbel>) {
            return std::exp(-x - std::exp(-x));
        } else if constexpr (std::is_same_v<T, Frechet>) {
            if (x <= 0.0) return 0.0;
            return law.alpha * std::pow(x, -law.alpha - 1.0) * std::exp(-std::pow(x, -law.alpha));
        } else if constexpr (std::is_same_v<T, Weibull>) {
            if (x >= 0.0) return 0.0;
            return law.alpha * std::pow(-x, law.alpha - 1.0) * std::exp(-std::pow(-x, law.alpha));
        } else if constexpr (std::is_same_v<T, Exponential>) {
            return x <= 0.0 ? 0.0 : std::exp(-x);
        } else if constexpr (std::is_same_v<T, Pareto>) {
            return x <= 1.0 ? 0.0 : law.alpha * std::pow(x, -law.alpha - 1.0);
        } else if constexpr (std::is_same_v<T, BetaLaw>) {
            if (x <= -1.0 || x >= 0.0) return 0.0;
            return law.alpha * std::pow(-x, law.alpha - 1.0);
        } else if constexpr (std::is_same_v<T, Dagum>) {
            if (x <= 0.0) return 0.0;
            const double u = std::pow(x, -law.alpha);
            return law.alpha * u / (x * (1.0 + u) * (1.0 + u));
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            if (x <= 0.0) return 0.0;
            return law.base->density(x) * std::exp(law.base->cdf(x) - 1.0);
        } else if constexpr (std::is_same_v<T, FreeStablePos> ||
                             std::is_same_v<T, BooleanStablePos> ||
                             std::is_same_v<T, ClassicalStablePos>) {
            stable_unsupported("density");
        } else {
            (void)law; (void)x;
            return 0.0;   // purely atomic
        }
    }, v_);
}

std::vector<Atom> Law::atoms() const {
    return std::visit([](const auto& law) -> std::vector<Atom> {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return {{law.location, 1.0}};
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            std::vector<Atom> out;
            if (law.mass_at_zero > 0.0) out.push_back({0.0, law.mass_at_zero});
            if (law.mass_at_zero < 1.0) out.push_back({law.location, 1.0 - law.mass_at_zero});
            return out;
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return poisson_atoms(law.lambda);
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            if (law.rate < 1.0) return {{0.0, 1.0 - law.rate}};
            return {};
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            // atom at 0 from the empty maximum, plus images of base atoms
            std::vector<Atom> out{{0.0, std::exp(law.base->cdf(0.0) - 1.0)}};
            for (const Atom& a : law.base->atoms()) {
                if (a.location <= 0.0) continue;
                const double jump = std::exp(law.base->cdf(a.location) - 1.0) * -std::expm1(-a.mass);
                out.push_back({a.location, jump});
            }
            return out;
        } else if constexpr (std::is_same_v<T, FreeStablePos> ||
                             std::is_same_v<T, BooleanStablePos> ||
                             std::is_same_v<T, ClassicalStablePos>) {
            stable_unsupported("atom list");
        } else {
            (void)law;
            return {};
        }
    }, v_);
}

double Law::atom_at_zero() const {
    for (const Atom& a : atoms())
        if (a.location == 0.0) return a.mass;
    return 0.0;
}

double Law::quantile(double p) const {
    require(p >= 0.0 && p <= 1.0, "quantile: p must lie in [0,1]");
    return std::visit([&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return law.location;
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return p;
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            const MpGeom g = mp_geom(law.rate);
            if (p <= g.atom0) return 0.0;
            if (p >= 1.0) return g.hi;
            auto f = [&](double y) { return mp_cdf(law.rate, y) - p; };
            return brent(f, g.lo, g.hi, g.atom0 - p, 1.0 - p, {1e-13, 0.0, 300});
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            if (law.mass_at_zero == 0.0) return law.location;
            return p <= law.mass_at_zero ? 0.0 : law.location;
        } else if constexpr (std::is_same_v<T, Poisson>) {
            double c = 0.0;
            const auto as = poisson_atoms(law.lambda);
            for (const Atom& a : as) {
                c += a.mass;
                if (c >= p) return a.location;
            }
            return as.back().location;
        } else if constexpr (std::is_same_v<T, Gumbel>) {
            return -std::log(-std::log(p));
        } else if constexpr (std::is_same_v<T, Frechet>) {
            if (p == 0.0) return 0.0;
            return std::pow(-std::log(p), -1.0 / law.alpha);
        } else if constexpr (std::is_same_v<T, Weibull>) {
            return -std::pow(-std::log(p), 1.0 / law.alpha);
        } else if constexpr (std::is_same_v<T, Exponential>) {
            return p >= 1.0 ? kInf : -std::log1p(-p);
        } else if constexpr (std::is_same_v<T, Pareto>) {
            return p >= 1.0 ? kInf : std::pow(1.0 - p, -1.0 / law.alpha);
        } else if constexpr (std::is_same_v<T, BetaLaw>) {
            return -std::pow(1.0 - p, 1.0 / law.alpha);
        } else if constexpr (std::is_same_v<T, Dagum>) {
            if (p == 0.0) return 0.0;
            if (p >= 1.0) return kInf;
            return std::pow(p / (1.0 - p), 1.0 / law.alpha);
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            const double a0 = std::exp(law.base->cdf(0.0) - 1.0);
            if (p <= a0) return 0.0;
            return law.base->quantile(1.0 + std::log(p));
        } else {
            stable_unsupported("quantile");
        }
    }, v_);
}

std::pair<double, double> Law::support() const {
    return std::visit([](const auto& law) -> std::pair<double, double> {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) {
            return {law.location, law.location};
        } else if constexpr (std::is_same_v<T, Uniform01>) {
            return {0.0, 1.0};
        } else if constexpr (std::is_same_v<T, MarchenkoPastur>) {
            const MpGeom g = mp_geom(law.rate);
            return {g.atom0 > 0.0 ? 0.0 : g.lo, g.hi};
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
            return {law.mass_at_zero > 0.0 ? 0.0 : law.location, law.location};
        } else if constexpr (std::is_same_v<T, Poisson>) {
            return {0.0, kInf};
        } else if constexpr (std::is_same_v<T, Gumbel>) {
            return {-kInf, kInf};
        } else if constexpr (std::is_same_v<T, Frechet>) {
            return {0.0, kInf};
        } else if constexpr (std::is_same_v<T, Weibull>) {
            return {-kInf, 0.0};
        } else if constexpr (std::is_same_v<T, Exponential>) {
            return {0.0, kInf};
        } else if constexpr (std::is_same_v<T, Pareto>) {
            return {1.0, kInf};
        } else if constexpr (std::is_same_v<T, BetaLaw>) {
            return {-1.0, 0.0};
        } else if constexpr (std::is_same_v<T, Dagum>) {
            return {0.0, kInf};
        } else if constexpr (std::is_same_v<T, MaxCompoundPoisson>) {
            return {0.0, law.base->support().second};
        } else {
            // positive stable families live on [0, inf)
            (void)law;
            return {0.0, kInf};
        }
    }, v_);
}

std::pair<double, double> Law::support_hint() const {
    if (is<FreeStablePos>() || is<BooleanStablePos>() || is<ClassicalStablePos>())
        stable_unsupported("support bounds");
    auto [lo, hi] = support();
    if (!std::isfinite(hi)) hi = quantile(1.0 - kTailMass);
    if (!std::isfinite(lo)) lo = quantile(kTailMass);
    return {lo, hi};
}

bool Law::nonnegative_support() const {
    return support().first >= 0.0;
}

std::string Law::name() const {
    return std::visit([](const auto& law) -> std::string {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) return fmt("dirac:%g", law.location);
        else if constexpr (std::is_same_v<T, Uniform01>) return "uniform";
        else if constexpr (std::is_same_v<T, MarchenkoPastur>) return fmt("mp:%g", law.rate);
        else if constexpr (std::is_same_v<T, TwoPoint>) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "twopoint:%g,%g", law.mass_at_zero, law.location);
            return buf;
        }
        else if constexpr (std::is_same_v<T, Poisson>) return fmt("poisson:%g", law.lambda);
        else if constexpr (std::is_same_v<T, FreeStablePos>) return fmt("fstable:%g", law.alpha);
        else if constexpr (std::is_same_v<T, BooleanStablePos>) return fmt("bstable:%g", law.alpha);
        else if constexpr (std::is_same_v<T, ClassicalStablePos>) return fmt("cstable:%g", law.alpha);
        else if constexpr (std::is_same_v<T, Gumbel>) return "gumbel";
        else if constexpr (std::is_same_v<T, Frechet>) return fmt("frechet:%g", law.alpha);
        else if constexpr (std::is_same_v<T, Weibull>) return fmt("weibull:%g", law.alpha);
        else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
        else if constexpr (std::is_same_v<T, Pareto>) return fmt("pareto:%g", law.alpha);
        else if constexpr (std::is_same_v<T, BetaLaw>) return fmt("beta:%g", law.alpha);
        else if constexpr (std::is_same_v<T, Dagum>) return fmt("dagum:%g", law.alpha);
        else return "mcp:" + law.base->name();
    }, v_);
}

std::string Law::describe() const {
    std::ostringstream os;
    os << name() << "  --  ";
    std::visit([&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Dirac>) os << "point mass at " << law.location;
        else if constexpr (std::is_same_v<T, Uniform01>) os << "uniform on (0,1)";
        else if constexpr (std::is_same_v<T, MarchenkoPastur>)
            os << "Marchenko-Pastur (free Poisson), rate " << law.rate;
        else if constexpr (std::is_same_v<T, TwoPoint>)
            os << law.mass_at_zero << " at 0 and " << 1.0 - law.mass_at_zero
               << " at " << law.location;
        else if constexpr (std::is_same_v<T, Poisson>) os << "Poisson, mean " << law.lambda;
        else if constexpr (std::is_same_v<T, FreeStablePos>)
            os << "positive free stable, index " << law.alpha << " (S-transform only)";
        else if constexpr (std::is_same_v<T, BooleanStablePos>)
            os << "positive Boolean stable, index " << law.alpha << " (S-transform only)";
        else if constexpr (std::is_same_v<T, ClassicalStablePos>)
            os << "positive classical stable, index " << law.alpha << " (catalog tag)";
        else if constexpr (std::is_same_v<T, Gumbel>) os << "Gumbel, exp(-exp(-x))";
        else if constexpr (std::is_same_v<T, Frechet>) os << "Frechet, exp(-x^-" << law.alpha << ")";
        else if constexpr (std::is_same_v<T, Weibull>)
            os << "max-Weibull on (-inf,0], exp(-(-x)^" << law.alpha << ")";
        else if constexpr (std::is_same_v<T, Exponential>) os << "standard exponential";
        else if constexpr (std::is_same_v<T, Pareto>) os << "Pareto on [1,inf), 1-x^-" << law.alpha;
        else if constexpr (std::is_same_v<T, BetaLaw>) os << "power law on [-1,0], 1-|x|^" << law.alpha;
        else if constexpr (std::is_same_v<T, Dagum>) os << "Dagum, (1+x^-" << law.alpha << ")^-1";
        else os << "max-compound Poisson over " << law.base->name();
    }, v_);
    return os.str();
}

Law Law::parse(const std::string& text) {
    const auto colon = text.find(':');
    const bool has_colon = colon != std::string::npos;
    const std::string head = text.substr(0, colon);
    const std::string rest = has_colon ? text.substr(colon + 1) : "";

    auto one = [&](const char* what) -> double {
        try {
            size_t used = 0;
            const double v = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("law '" + text + "': expected " + what +
                                        " after ':', e.g. '" + head + ":1'");
        }
    };
    auto none = [&]() {
        if (!rest.empty())
            throw std::invalid_argument("law '" + head + "' takes no parameter");
    };

    // bare "mp" means rate 1; "mp:" (colon, nothing after) is malformed
    if (head == "mp") return Law(MarchenkoPastur{has_colon ? one("a rate") : 1.0});
    if (head == "uniform") { none(); return Law(Uniform01{}); }
    if (head == "dirac") return Law(Dirac{one("a location")});
    if (head == "twopoint") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("law 'twopoint' needs two parameters: twopoint:p,a");
        try {
            const double p = std::stod(rest.substr(0, comma));
            const double a = std::stod(rest.substr(comma + 1));
            return Law(TwoPoint{p, a});
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("law 'twopoint': could not parse 'twopoint:" + rest + "'");
        }
    }
    if (head == "poisson") return Law(Poisson{one("a mean")});
    if (head == "fstable") return Law(FreeStablePos{one("an index in (0,1)")});
    if (head == "bstable") return Law(BooleanStablePos{one("an index in (0,1)")});
    if (head == "cstable") return Law(ClassicalStablePos{one("an index in (0,1)")});
    if (head == "gumbel") { none(); return Law(Gumbel{}); }
    if (head == "frechet") return Law(Frechet{one("an index")});
    if (head == "weibull") return Law(Weibull{one("an index")});
    if (head == "exponential") { none(); return Law(Exponential{}); }
    if (head == "pareto") return Law(Pareto{one("an index")});
    if (head == "beta") return Law(BetaLaw{one("an index")});
    if (head == "dagum") return Law(Dagum{one("an index")});
    if (head == "mcp") {
        if (rest.empty())
            throw std::invalid_argument("law 'mcp' needs a base law: mcp:<law>");
        return Law(MaxCompoundPoisson{std::make_shared<Law>(parse(rest))});
    }
    throw std::invalid_argument("unknown law '" + text + "'");
}

std::vector<Law> Law::catalog() {
    return {
        Law(MarchenkoPastur{1.0}), Law(MarchenkoPastur{2.0}), Law(Uniform01{}),
        Law(Dirac{1.0}), Law(TwoPoint{0.5, 2.0}), Law(Poisson{1.0}),
        Law(FreeStablePos{0.5}), Law(BooleanStablePos{0.5}), Law(ClassicalStablePos{0.5}),
        Law(Gumbel{}), Law(Frechet{1.0}), Law(Weibull{1.0}), Law(Exponential{}),
        Law(Pareto{1.0}), Law(BetaLaw{1.0}), Law(Dagum{1.0}),
        Law(MaxCompoundPoisson{std::make_shared<Law>(Law(Uniform01{}))}),
    };
}

} // namespace freemax
