#include "freemax/stransform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "freemax/errors.hpp"
#include "freemax/rootfind.hpp"

namespace freemax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double out_atom_free(double a0, double t) {
    // an atom survives a free power only while its mass exceeds 1 - 1/t
    return std::max(t * a0 - (t - 1.0), 0.0);
}

double out_atom_boolean(double a0, double t) {
    return a0 > 0.0 ? a0 / (t - (t - 1.0) * a0) : 0.0;
}

} // namespace

STransform::STransform(std::function<double(double)> eval, double atom_at_zero,
                       double a, double b, Provenance prov, std::string label)
    : eval_(std::move(eval)), atom0_(atom_at_zero), a_(a), b_(b), prov_(prov),
      label_(std::move(label)) {
    if (!eval_) throw std::invalid_argument("STransform needs an evaluator");
    if (atom0_ < 0.0 || atom0_ >= 1.0)
        throw std::invalid_argument("STransform: atom at 0 must lie in [0,1)");
    if (a_ < 0.0 || !(b_ > 0.0))
        throw std::invalid_argument("STransform: need 0 <= a and 0 < b");
}

STransform STransform::constant(double value, double location, std::string label) {
    STransform s([value](double) { return value; }, 0.0,
                 location > 0.0 ? location : 1.0, location > 0.0 ? location : 1.0,
                 Provenance::closed_form, std::move(label));
    s.constant_ = true;
    s.const_loc_ = location;
    return s;
}

double STransform::operator()(double z) const {
    if (!constant_ && (z <= domain_lo() || z >= 0.0))
        throw std::domain_error("STransform: argument outside (atom0 - 1, 0)");
    return eval_(z);
}

double STransform::constant_location() const {
    if (!constant_) throw std::logic_error("STransform: not a point-mass transform");
    return const_loc_;
}

double STransform::inverse(double s) const {
    if (constant_)
        throw std::domain_error("STransform: point-mass transform has no inverse");
    const double s_lo = b_ == kInf ? 0.0 : 1.0 / b_;   // inf of the image
    const double s_hi = a_ == 0.0 ? kInf : 1.0 / a_;
    if (!(s > s_lo) || !(s < s_hi))
        throw std::domain_error("STransform::inverse: value outside image (1/b, 1/a)");
    const double lo = domain_lo();
    const double w = -lo;                               // domain width
    return solve_monotone([this](double z) { return eval_(z); }, s,
                          lo, 0.0, lo + 0.45 * w, -0.45 * w, {1e-14, 0.0, 300});
}

STransform s_free_power(const STransform& s, double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("free power needs t >= 1");
    if (s.constant()) return STransform::constant(s(-0.5) / t, s.constant_location() * t,
                                                  s.label() + "-freepow");
    const double a0 = out_atom_free(s.atom_at_zero(), t);
    return STransform([s, t](double z) { return s(z / t) / t; }, a0,
                      t * s.a(), t * s.b(), s.provenance(), s.label() + "-freepow");
}

STransform s_boolean_power(const STransform& s, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("Boolean power needs t > 0");
    if (s.constant()) return STransform::constant(s(-0.5) / t, s.constant_location() * t,
                                                  s.label() + "-boolpow");
    const double a0 = out_atom_boolean(s.atom_at_zero(), t);
    return STransform([s, t](double z) { return s(z / (t + (t - 1.0) * z)) / t; }, a0,
                      t * s.a(), t * s.b(), s.provenance(), s.label() + "-boolpow");
}

STransform free_mult_power_s(const STransform& s, int n) {
    if (n < 1) throw std::invalid_argument("multiplicative power needs n >= 1");
    if (s.constant())
        return STransform::constant(std::pow(s(-0.5), n),
                                    std::pow(s.constant_location(), n), s.label() + "-multpow");
    const double an = std::pow(s.a(), n);
    const double bn = s.b() == kInf ? kInf : std::pow(s.b(), n);
    return STransform([s, n](double z) { return std::pow(s(z), n); }, s.atom_at_zero(),
                      an, bn, s.provenance(), s.label() + "-multpow");
}

STransform dilation_s_rule(const STransform& s, double c) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("dilation factor must be finite and > 0");
    if (s.constant())
        return STransform::constant(s(-0.5) / c, s.constant_location() * c,
                                    s.label() + "-dilated");
    return STransform([s, c](double z) { return s(z) / c; }, s.atom_at_zero(),
                      c * s.a(), s.b() == kInf ? kInf : c * s.b(), s.provenance(),
                      s.label() + "-dilated");
}

STransform s_bt_composite(const STransform& s, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("composite power needs t >= 0");
    if (t == 0.0) return s;
    if (s.constant()) return s;   // point masses are fixed by the composite flow
    const double a_free = out_atom_free(s.atom_at_zero(), 1.0 + t);
    const double a0 = out_atom_boolean(a_free, 1.0 / (1.0 + t));
    return STransform([s, t](double z) { return s(z / (1.0 - t * z)); }, a0,
                      s.a(), s.b(), s.provenance(), s.label() + "-composite");
}

} // namespace freemax
