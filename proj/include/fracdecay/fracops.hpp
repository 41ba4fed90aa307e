#pragma once

#include <vector>

#include "fracdecay/frac_order.hpp"
#include "fracdecay/grid.hpp"

namespace fracdecay {

// A function sampled on a radial grid, interpreted through its
// piecewise-linear interpolant from the grid origin (a = 0).
struct SampledFunction {
    RadialGrid grid;
    std::vector<double> values;

    static SampledFunction make(RadialGrid grid, std::vector<double> values);
    double operator[](std::size_t i) const noexcept { return values[i]; }
    std::size_t size() const noexcept { return values.size(); }
};

// Riemann-Liouville integral I^order from 0: the interpolant of f is
// integrated against (x - s)^(order-1) panel by panel in closed form.
// Exact (up to roundoff) for constant and linear f.
SampledFunction rl_integral(const SampledFunction& f, double order);
inline SampledFunction rl_integral(const SampledFunction& f, const FracOrder& o) {
    return rl_integral(f, o.alpha());
}

// Caputo derivative of order in (0,1): L1-type scheme, panel slopes of the
// interpolant integrated against (x - s)^(-order) in closed form.
// Value at the origin is 0 (empty integral).
SampledFunction caputo_derivative(const SampledFunction& f, double order);
inline SampledFunction caputo_derivative(const SampledFunction& f, const FracOrder& o) {
    return caputo_derivative(f, o.alpha());
}

// Riemann-Liouville derivative: Caputo plus the singular correction
// x^(-order) f(0) / Gamma(1-order). When f(0) != 0 the node at x = 0 is a
// genuine singularity and is reported as +-infinity, never clipped.
SampledFunction rl_derivative(const SampledFunction& f, double order);
inline SampledFunction rl_derivative(const SampledFunction& f, const FracOrder& o) {
    return rl_derivative(f, o.alpha());
}

namespace detail {
// a^mu - b^mu for a > b >= 0 with d = a - b known exactly; stable when a ~ b.
double pow_diff(double a, double b, double d, double mu);
}  // namespace detail

}  // namespace fracdecay
