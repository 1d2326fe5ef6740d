#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "freemax/errors.hpp"

namespace freemax {

// Point mass carried alongside a continuous part.
struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

class Law;

// ---- catalog tags -----------------------------------------------------------
// Measures on [0,inf) that enter the multiplicative calculus:
struct Dirac { double location; };                  // delta_a, a >= 0
struct Uniform01 {};                                // Lebesgue on (0,1)
struct MarchenkoPastur { double rate; };            // free Poisson, rate t > 0
struct TwoPoint { double mass_at_zero; double location; }; // p*delta_0 + (1-p)*delta_a
struct Poisson { double lambda; };                  // classical Poisson, lambda > 0
struct FreeStablePos { double alpha; };             // positive free strictly stable, 0<alpha<1
struct BooleanStablePos { double alpha; };          // positive Boolean stable, 0<alpha<1
struct ClassicalStablePos { double alpha; };        // positive classical stable (catalog tag only)

// Extreme-value / max-domain distribution functions on the real line.  These
// are admitted as CDF objects for the max-convolution side; the ones with
// negative support never enter the [0,inf) transform pipeline.
struct Gumbel {};                                   // exp(-exp(-x))
struct Frechet { double alpha; };                   // exp(-x^-alpha), x > 0
struct Weibull { double alpha; };                   // exp(-(-x)^alpha), x <= 0
struct Exponential {};                              // max(0, 1 - e^-x)
struct Pareto { double alpha; };                    // max(0, 1 - x^-alpha)
struct BetaLaw { double alpha; };                   // 1 - |x|^alpha on [-1, 0]
struct Dagum { double alpha; };                     // (1 + x^-alpha)^-1, x > 0

// Max-compound Poisson law with intensity 1 and base `base`: the CDF is
// exp(-(1 - F_base(x))) for x >= 0 with the sub-zero mass collected as an
// atom at 0 (the empty maximum).
struct MaxCompoundPoisson { std::shared_ptr<const Law> base; };

using LawVariant = std::variant<Dirac, Uniform01, MarchenkoPastur, TwoPoint, Poisson,
                                FreeStablePos, BooleanStablePos, ClassicalStablePos,
                                Gumbel, Frechet, Weibull, Exponential, Pareto,
                                BetaLaw, Dagum, MaxCompoundPoisson>;

// A catalog law: closed-form CDF/density/quantile where available.
class Law {
public:
    explicit Law(LawVariant v);

    const LawVariant& variant() const { return v_; }

    template <class T> bool is() const { return std::holds_alternative<T>(v_); }
    template <class T> const T& as() const { return std::get<T>(v_); }

    // Distribution function F(x) = m((-inf, x]), right-continuous.
    double cdf(double x) const;

    bool has_density() const;
    double density(double x) const;

    // All atoms (including a possible one at 0), sorted by location.
    // Discrete tails (Poisson) are truncated once the remaining mass drops
    // below 1e-16; the last atom absorbs the remainder so masses sum to 1.
    std::vector<Atom> atoms() const;
    double atom_at_zero() const;

    // Left-continuous generalized inverse, inf{x : F(x) >= p}.  p in [0,1];
    // p = 0 yields the lower support endpoint.
    double quantile(double p) const;

    // Smallest closed interval carrying all mass (+-inf allowed).  Unbounded
    // discrete/continuous tails report the 1 - 1e-16 quantile as a finite hint
    // through support_hint().
    std::pair<double, double> support() const;
    std::pair<double, double> support_hint() const;

    bool nonnegative_support() const;

    std::string name() const;      // grammar spelling, e.g. "twopoint:0.5,2"
    std::string describe() const;  // one-line human description

    // Parse the CLI grammar: mp | mp:2 | twopoint:0.5,2 | poisson:1 |
    // fstable:0.5 | bstable:0.5 | cstable:0.5 | dirac:1 | uniform | gumbel |
    // frechet:1 | weibull:2 | exponential | pareto:1 | beta:1 | dagum:1 |
    // mcp:<base>.  Throws std::invalid_argument on malformed input.
    static Law parse(const std::string& text);

    // Everything the CLI "catalog" verb lists, with a representative
    // parameter choice for the parametric families.
    static std::vector<Law> catalog();

private:
    LawVariant v_;
};

} // namespace freemax
