#pragma once

#include "fracdecay/frac_order.hpp"
#include "fracdecay/profile.hpp"

namespace fracdecay {

// Algebraic continuation of the profile past the table end, with exponents
// matching the large-x expansion of the defining series:
//   Phi(x) ~ k0 x^-(1+a) + k1 x^-(2+a) + k2 x^-(2+2a).
// Coefficients are least-squares fitted on the far part of the table.
struct ProfileTail {
    double k0 = 0.0, k1 = 0.0, k2 = 0.0;
    double start = 0.0;         // fit window start (tail_bound_start)
    double max_residual = 0.0;  // worst |fit - table| over the window

    double phi(double alpha, double x) const;
    // int_x^inf of the fitted tail
    double integral(double alpha, double x) const;
};

struct A0Result {
    double value = 0.0;
    double est_error = 0.0;      // half-width of the certified bracket on a0
    double table_integral = 0.0; // composite quadrature of Phi over the table
    double tail_integral = 0.0;  // fitted tail mass beyond x_max
    ProfileTail tail;
};

// Normalisation 1/a0 = 2 [ int_0^xmax Phi + tail ]. The tail is the fitted
// algebraic continuation, bracketed above by the integrated coarse envelope
// Gamma(a+2) 2^(1+a) x^-a / a; the error estimate combines the fit residual,
// the structural (next-order) uncertainty and the table quadrature error.
// Fails when the estimate exceeds tol, instructing the caller to extend x_max.
A0Result compute_a0(const ProfileTable& profile, double tol);

// The self-similar fundamental solution E_t(x) = a0 t^-b Phi(|x| t^-b),
// b = 1/(1+alpha), extended evenly to the whole line.
class FundamentalSolution {
public:
    FundamentalSolution(ProfileTable profile, double a0_tol);

    struct Eval {
        double value;
        bool extrapolated;  // |x| t^-b landed beyond the table
    };

    // Throws std::domain_error for t <= 0.
    Eval evaluate(double x, double t) const;
    double operator()(double x, double t) const { return evaluate(x, t).value; }

    // Certified pointwise ceiling a0 t^-b min(1, Gamma(a+2)(2/xi)^(1+a)).
    double envelope_upper(double x, double t) const;

    // int_{xi}^inf Phi for xi >= tail_bound_start, via the fitted tail.
    double profile_tail_mass(double xi) const;

    const FracOrder& order() const noexcept { return profile_.order; }
    const ProfileTable& profile() const noexcept { return profile_; }
    double a0() const noexcept { return a0_.value; }
    double a0_error() const noexcept { return a0_.est_error; }
    const A0Result& a0_result() const noexcept { return a0_; }
    double tail_bound_start() const noexcept { return a0_.tail.start; }
    double x_max() const noexcept { return profile_.x_max(); }

private:
    ProfileTable profile_;
    A0Result a0_;
};

}  // namespace fracdecay
