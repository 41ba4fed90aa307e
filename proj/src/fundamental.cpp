#include "fracdecay/fundamental.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracdecay/csv.hpp"
#include "fracdecay/errors.hpp"

namespace fracdecay {

namespace {

// Solve the 3x3 normal equations in long double (the basis is mildly
// ill-conditioned on a short window).
std::array<double, 3> solve3(std::array<std::array<long double, 3>, 3> A,
                             std::array<long double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(static_cast<double>(A[r][col])) >
                std::fabs(static_cast<double>(A[piv][col])))
                piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        if (A[col][col] == 0.0L) throw ComputationError("compute_a0: singular tail fit system");
        for (int r = col + 1; r < 3; ++r) {
            const long double f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < 3; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        long double s = b[r];
        for (int c2 = r + 1; c2 < 3; ++c2) s -= A[r][c2] * x[c2];
        x[r] = static_cast<double>(s / A[r][r]);
    }
    return x;
}

// Fit Phi(x) x^(1+a) = k0 + k1 u + k2 u^(1+a) with u = start/x over the window.
ProfileTail fit_tail(const ProfileTable& table, double window_fraction) {
    const double a = table.order.alpha();
    const double c = 1.0 + a;
    const double x_max = table.x_max();
    ProfileTail tail;
    tail.start = x_max * window_fraction;

    std::array<std::array<long double, 3>, 3> A{};
    std::array<long double, 3> rhs{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double x = table.grid[i];
        if (x < tail.start) continue;
        const double u = tail.start / x;
        const std::array<long double, 3> phi_basis = {1.0L, u, std::pow(u, c)};
        const long double g = table.phi[i] * std::pow(x, c);
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) A[r][s] += phi_basis[r] * phi_basis[s];
            rhs[r] += phi_basis[r] * g;
        }
        ++count;
    }
    if (count < 8)
        throw ComputationError("compute_a0: too few nodes in the tail-fit window; extend x_max");
    const auto k = solve3(A, rhs);
    // convert from the u-basis back to coefficients of x^-(1+a), x^-(2+a), x^-(2+2a)
    tail.k0 = k[0];
    tail.k1 = k[1] * tail.start;
    tail.k2 = k[2] * std::pow(tail.start, c);

    for (std::size_t i = 0; i < table.size(); ++i) {
        const double x = table.grid[i];
        if (x < tail.start) continue;
        const double model = tail.phi(a, x);
        tail.max_residual =
            std::max(tail.max_residual, std::fabs(model - table.phi[i]) * std::pow(x, c));
    }
    return tail;
}

}  // namespace

double ProfileTail::phi(double alpha, double x) const {
    const double c = 1.0 + alpha;
    const double xc = std::pow(x, -c);
    return xc * (k0 + k1 / x + k2 * xc);
}

double ProfileTail::integral(double alpha, double x) const {
    const double c = 1.0 + alpha;
    return k0 * std::pow(x, -alpha) / alpha + k1 * std::pow(x, -c) / c +
           k2 * std::pow(x, -(1.0 + 2.0 * alpha)) / (1.0 + 2.0 * alpha);
}

A0Result compute_a0(const ProfileTable& profile, double tol) {
    const double a = profile.order.alpha();
    const double x_max = profile.x_max();
    if (!(x_max > 1.0))
        throw std::invalid_argument("compute_a0: profile must extend past x = 1");
    if (!(tol > 0.0)) throw std::invalid_argument("compute_a0: tol must be > 0");

    A0Result out;

    // composite trapezoid over the table, with a second-difference error estimate
    double integral = 0.0, quad_err = 0.0;
    const auto& x = profile.grid.nodes();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        integral += 0.5 * h * (profile.phi[i] + profile.phi[i + 1]);
        if (i + 2 < x.size()) {
            const double h2 = x[i + 2] - x[i + 1];
            const double curv =
                2.0 * std::fabs((profile.phi[i + 2] - profile.phi[i + 1]) / h2 -
                                (profile.phi[i + 1] - profile.phi[i]) / h) /
                (h + h2);
            quad_err += curv * h * h * h / 12.0;
        }
    }
    out.table_integral = integral;

    // fitted algebraic tail; two-term refit quantifies the structural error
    out.tail = fit_tail(profile, 0.6);
    out.tail_integral = out.tail.integral(a, x_max);

    ProfileTail two_term = out.tail;
    two_term.k2 = 0.0;
    {
        // quick 2-parameter refit on the same window for the error estimate
        const double c = 1.0 + a;
        long double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const double xi = profile.grid[i];
            if (xi < out.tail.start) continue;
            const double u = out.tail.start / xi;
            const long double g = profile.phi[i] * std::pow(xi, c);
            s00 += 1.0L;
            s01 += u;
            s11 += static_cast<long double>(u) * u;
            r0 += g;
            r1 += u * g;
        }
        const long double det = s00 * s11 - s01 * s01;
        two_term.k0 = static_cast<double>((r0 * s11 - r1 * s01) / det);
        two_term.k1 = static_cast<double>((r1 * s00 - r0 * s01) / det) * out.tail.start;
    }
    const double structural = std::fabs(two_term.integral(a, x_max) - out.tail_integral);

    // certified ceiling: integrated coarse envelope of the profile decay
    const double envelope_tail =
        std::tgamma(a + 2.0) * std::pow(2.0, 1.0 + a) * std::pow(x_max, -a) / a;
    if (out.tail_integral < 0.0 || out.tail_integral > envelope_tail)
        throw ComputationError(
            "compute_a0: fitted tail escapes the certified bracket [0, " +
            format_double(envelope_tail) + "]; table too short or too inaccurate");

    const double fit_err = out.tail.max_residual * std::pow(x_max, -a) / a;
    const double inv_a0 = 2.0 * (integral + out.tail_integral);
    out.value = 1.0 / inv_a0;
    const double inv_err = 2.0 * (quad_err + fit_err + structural);
    out.est_error = out.value * out.value * inv_err;

    if (out.est_error > tol)
        throw ComputationError("compute_a0: error estimate " + format_double(out.est_error) +
                               " exceeds tol " + format_double(tol) +
                               "; extend x_max (tail fraction " +
                               format_double(out.tail_integral / (integral + out.tail_integral)) +
                               ")");
    return out;
}

FundamentalSolution::FundamentalSolution(ProfileTable profile, double a0_tol)
    : profile_(std::move(profile)), a0_(compute_a0(profile_, a0_tol)) {
    if (!(a0_.value > 0.0)) throw InvariantViolation("FundamentalSolution: a0 must be positive");
}

FundamentalSolution::Eval FundamentalSolution::evaluate(double x, double t) const {
    if (!(t > 0.0)) throw std::domain_error("FundamentalSolution: t must be > 0");
    const double beta = order().similarity_exponent();
    const double scale = std::pow(t, -beta);
    const double xi = std::fabs(x) * scale;
    if (xi <= profile_.x_max()) return {a0_.value * scale * profile_.interpolate_phi(xi), false};
    return {a0_.value * scale * std::max(a0_.tail.phi(order().alpha(), xi), 0.0), true};
}

double FundamentalSolution::envelope_upper(double x, double t) const {
    if (!(t > 0.0)) throw std::domain_error("FundamentalSolution: t must be > 0");
    const double a = order().alpha();
    const double beta = order().similarity_exponent();
    const double scale = std::pow(t, -beta);
    const double xi = std::fabs(x) * scale;
    const double cap = xi > 1.0 ? std::tgamma(a + 2.0) * std::pow(2.0 / xi, 1.0 + a) : 1.0;
    return a0_.value * scale * std::min(1.0, cap);
}

double FundamentalSolution::profile_tail_mass(double xi) const {
    if (!(xi >= a0_.tail.start))
        throw std::invalid_argument("profile_tail_mass: xi must be >= tail_bound_start");
    return a0_.tail.integral(order().alpha(), xi);
}

}  // namespace fracdecay
