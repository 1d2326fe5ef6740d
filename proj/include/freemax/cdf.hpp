#pragma once

#include <functional>
#include <memory>
#include <string>

#include "freemax/grid_measure.hpp"
#include "freemax/law.hpp"

namespace freemax {

// A distribution function on the real line, presented as an evaluator plus
// support hints.  Max-convolution operations act pointwise on CDF values, so
// this is the common currency between the transform side (measures on
// [0,inf)) and the extreme-value side (which may live on all of R).
class Cdf {
public:
    using Fn = std::function<double(double)>;

    Cdf(Fn eval, double support_lo, double support_hi, std::string label = "");

    double operator()(double x) const { return eval_(x); }

    // inf{x : F(x) >= p}; closed form when a quantile function was attached,
    // otherwise monotone bisection between the support hints (expanding past
    // infinite ends).  p = 0 returns the lower support endpoint.
    double quantile(double p) const;
    void set_quantile(Fn q) { quantile_ = std::move(q); }
    bool has_closed_quantile() const { return static_cast<bool>(quantile_); }

    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }

    const std::string& label() const { return label_; }
    void set_label(std::string s) { label_ = std::move(s); }

    static Cdf from_law(const Law& law);
    static Cdf from_grid(GridMeasure m);   // shares ownership of a copy

private:
    Fn eval_;
    Fn quantile_;
    double lo_, hi_;
    std::string label_;
};

// D_c: X is distributed by F  =>  cX is distributed by the result (c > 0).
Cdf dilate(const Cdf& f, double c);

} // namespace freemax
