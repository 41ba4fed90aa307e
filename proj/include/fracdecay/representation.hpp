#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracdecay/datum.hpp"
#include "fracdecay/fundamental.hpp"
#include "fracdecay/grid.hpp"

namespace fracdecay {

// Half-convolutions of the datum with the fundamental solution:
//   v+(x,t) = int_0^R E_t(x+y) g(y) dy,   v-(x,t) = int_0^R E_t(x-y) g(y) dy.
// Adaptive quadrature; for v- the integrand kink at y = x (even reflection)
// is a forced panel boundary.
double eval_v(const FundamentalSolution& fs, const InitialDatum& g, double x, double t,
              bool plus);

// Dirichlet and fixed-slope solution representations.
double eval_w1(const FundamentalSolution& fs, const InitialDatum& g, double x, double t);
double eval_w2(const FundamentalSolution& fs, const InitialDatum& g, double x, double t);

enum class SliceKind : std::uint8_t { W1, W2, VPlus, VMinus, W2MinusTwoME };

struct SolutionSlice {
    RadialGrid grid;
    double t = 0.0;
    SliceKind which = SliceKind::W1;
    std::vector<double> values;
};

SolutionSlice build_slice(const FundamentalSolution& fs, const InitialDatum& g, SliceKind which,
                          double t, const RadialGrid& x_grid);

// |values| <= amplitude * x^-exponent beyond the slice grid.
struct TailEnvelope {
    double amplitude = 0.0;
    double exponent = 1.0;
};

// L^p norm of a slice over [0, inf), p in (1, inf]: composite quadrature of
// |values|^p over the grid plus the certified envelope tail (p = inf returns
// the grid max after checking the envelope cannot exceed it beyond the grid).
// Throws ComputationError when the tail contribution is not under control,
// instructing a larger evaluation window.
double lp_norm(const SolutionSlice& slice, double p,
               std::optional<TailEnvelope> tail = std::nullopt);

// Evaluation grid for solution slices: a fine linear section through the
// datum support and near field, then geometric stretching out to x_big.
RadialGrid make_eval_grid(double fine_end, double x_big, std::size_t n_fine,
                          std::size_t n_stretch);

}  // namespace fracdecay
