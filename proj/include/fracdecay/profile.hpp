#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fracdecay/frac_order.hpp"
#include "fracdecay/grid.hpp"

namespace fracdecay {

// n-th coefficient of the profile power series, b_0 = 1,
// b_n = b_{n-1} * Gamma((1+a)(n-1)+2) / Gamma((1+a)(n-1)+a+2),
// evaluated in log-Gamma form.
double ml_coefficient(const FracOrder& order, int n);

struct SeriesEval {
    double value = 0.0;
    bool reliable = true;   // false when partial sums grew past the cancellation threshold
    int terms = 0;
    double est_error = 0.0; // truncation tolerance plus cancellation roundoff
};

// Partial sum of sum_n b_n z^n at z = -x^(1+a)/(1+a), truncated once the
// next-term magnitude drops below tol. `reliable` turns false when
// (max partial-sum magnitude) / (|result| + tol) exceeds 1e6.
// Throws ComputationError if 1e4 terms do not suffice.
SeriesEval phi_series(const FracOrder& order, double x, double tol);

// Termwise derivative of the same series: Phi'(x) = -x^a sum_{n>=1} n b_n z^(n-1).
SeriesEval phi_prime_series(const FracOrder& order, double x, double tol);

enum class ProfileMethod : std::uint8_t { Series, Volterra };

// Tabulated profile Phi with its derivative and per-node provenance.
struct ProfileTable {
    FracOrder order;
    RadialGrid grid;
    std::vector<double> phi;
    std::vector<double> phi_prime;
    std::vector<ProfileMethod> method;
    std::vector<double> est_error;
    bool derivative_filled = false;
    // worst |series - volterra| over the cross-validation window (0 when the
    // series covered the whole table)
    double overlap_disagreement = 0.0;

    double x_max() const noexcept { return grid.x_max(); }
    std::size_t size() const noexcept { return grid.size(); }

    // Linear interpolation; x must lie in [0, x_max] (clamped at the ends).
    double interpolate_phi(double x) const;
    double interpolate_phi_prime(double x) const;

    // Throws InvariantViolation on the first failed table invariant:
    // phi[0]==1, phi positive and non-increasing, x*phi <= 4,
    // phi_prime <= 0 with phi_prime[0] == 0 (when the derivative is filled).
    void validate() const;

    // CSV with header x,phi,phi_prime,method,est_error (shortest round-trip floats).
    void write_csv(std::ostream& out) const;
};

// Solves Phi(x) = 1 - (Gamma(a)(1+a))^-1 * int_0^x s Phi(s) (x-s)^(a-1) ds
// by forward product integration with a piecewise-linear unknown.
// phi only: phi_prime is left zero and derivative_filled is false.
// Throws ComputationError (with the offending node) if positivity or
// monotonicity is lost, which signals a grid too coarse for this order.
ProfileTable phi_volterra(const FracOrder& order, const RadialGrid& grid);

struct BuildOptions {
    std::size_t n_nodes = 20001;
    double grading = 2.0;          // 1.0 selects a uniform grid
    double march_spacing = 1e-3;   // internal uniform continuation grid
    double phi_floor = 1e-13;      // truncate the table once Phi falls below
    double overlap_fraction = 0.2; // overlap window as a fraction of the reliable range
};

// Hybrid table: series values where the series is reliable, a high-order
// Volterra continuation beyond the crossover, cross-validated on an overlap
// window ( |series - volterra| <= 10*tol, else ComputationError carrying both
// values). phi_prime comes from the termwise series in the series region and
// from Phi' = -(1+a)^-1 D^(1-a)[x Phi] (fracops Caputo form on the tabulated
// x*Phi, which vanishes at 0) beyond; phi_prime[0] = 0.
ProfileTable build_profile(const FracOrder& order, double x_max, double tol,
                           const BuildOptions& options = {});

namespace detail {
// Third-order product-integration march for the profile on a uniform grid
// of spacing h with n nodes (x_i = i h). Used by build_profile internally;
// exposed for convergence studies.
std::vector<double> volterra_march_uniform(const FracOrder& order, double h, std::size_t n);
}  // namespace detail

}  // namespace fracdecay
