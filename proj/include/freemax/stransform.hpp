#pragma once

#include <functional>
#include <string>

namespace freemax {

// S-transform of a probability measure on [0,inf) that is not concentrated
// at a single point: strictly decreasing on (mass_at_zero - 1, 0) with image
// (1/b, 1/a), where b is the first moment and a the reciprocal x^-1 moment
// (a = 0 when that integral diverges, b = +inf for heavy upper tails).
//
// Dirac masses get the degenerate constant transform S == 1/location with
// constant() == true; inverse() is unavailable there.
class STransform {
public:
    enum class Provenance { closed_form, grid_numeric };

    STransform(std::function<double(double)> eval, double atom_at_zero,
               double a, double b, Provenance prov, std::string label);

    static STransform constant(double value, double location, std::string label);

    double operator()(double z) const;
    // solve S(z) = s on (atom0 - 1, 0); requires s in (1/b, 1/a)
    double inverse(double s) const;

    double domain_lo() const { return atom0_ - 1.0; }
    double atom_at_zero() const { return atom0_; }
    double a() const { return a_; }
    double b() const { return b_; }
    bool constant() const { return constant_; }
    double constant_location() const;
    Provenance provenance() const { return prov_; }
    bool closed_form() const { return prov_ == Provenance::closed_form; }
    const std::string& label() const { return label_; }

private:
    std::function<double(double)> eval_;
    double atom0_ = 0.0;
    double a_ = 0.0, b_ = 0.0;
    bool constant_ = false;
    double const_loc_ = 0.0;
    Provenance prov_ = Provenance::closed_form;
    std::string label_;
};

// --- semigroup actions expressed on the S-transform --------------------------

// free additive power, t >= 1:  S_out(z) = (1/t) S(z/t)
STransform s_free_power(const STransform& s, double t);

// Boolean additive power, t > 0:  S_out(z) = (1/t) S(z / (t + (t-1) z))
STransform s_boolean_power(const STransform& s, double t);

// free multiplicative power, integer n >= 1:  S_out = S^n
STransform free_mult_power_s(const STransform& s, int n);

// dilation by c > 0:  S_out(z) = S(z) / c
STransform dilation_s_rule(const STransform& s, double c);

// composite (free power 1+t, then Boolean power 1/(1+t)), t >= 0:
// S_out(z) = S(z / (1 - t z))
STransform s_bt_composite(const STransform& s, double t);

} // namespace freemax
