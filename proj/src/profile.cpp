#include "fracdecay/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fracdecay/csv.hpp"
#include "fracdecay/errors.hpp"
#include "fracdecay/fracops.hpp"

namespace fracdecay {

namespace {

constexpr int kTermCap = 10000;
constexpr double kCancelThreshold = 1e6;
constexpr double kOverflowGuard = 1e280;

// Successive coefficient ratios b_n / b_{n-1}; shared across evaluations at
// the same order, so the log-Gamma work is cached.
class CoeffRatios {
public:
    explicit CoeffRatios(const FracOrder& order)
        : c_(order.one_plus_alpha()), alpha_(order.alpha()) {}

    double operator()(int n) {  // b_n / b_{n-1}, n >= 1
        const std::size_t i = static_cast<std::size_t>(n - 1);
        while (ratios_.size() <= i) {
            const double j = static_cast<double>(ratios_.size());
            ratios_.push_back(
                std::exp(std::lgamma(c_ * j + 2.0) - std::lgamma(c_ * j + alpha_ + 2.0)));
        }
        return ratios_[i];
    }

private:
    double c_, alpha_;
    std::vector<double> ratios_;
};

SeriesEval phi_series_impl(CoeffRatios& ratio, const FracOrder& order, double x, double tol) {
    if (!(x >= 0.0)) throw std::invalid_argument("phi_series: x must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("phi_series: tol must be > 0");
    if (x == 0.0) return SeriesEval{1.0, true, 0, 0.0};

    const double c = order.one_plus_alpha();
    const double z = -std::pow(x, c) / c;
    double term = ratio(1) * z;  // t_1 = b_1 z
    double sum = 1.0 + term;
    double max_mag = std::max({1.0, std::fabs(sum), std::fabs(term)});
    int n = 1;
    bool decaying = false;
    while (n < kTermCap) {
        const double prev = std::fabs(term);
        term *= z * ratio(n + 1);
        sum += term;
        ++n;
        const double mag = std::fabs(term);
        max_mag = std::max({max_mag, std::fabs(sum), mag});
        if (mag > kOverflowGuard) return SeriesEval{sum, false, n, std::fabs(sum)};
        if (mag < prev) decaying = true;
        if (decaying && mag < tol) break;
    }
    if (n >= kTermCap)
        throw ComputationError("phi_series: no convergence within " + std::to_string(kTermCap) +
                               " terms at x = " + format_double(x));
    const double cancel = max_mag / (std::fabs(sum) + tol);
    return SeriesEval{sum, cancel <= kCancelThreshold, n,
                      tol + 4.0 * max_mag * std::numeric_limits<double>::epsilon()};
}

SeriesEval phi_prime_series_impl(CoeffRatios& ratio, const FracOrder& order, double x,
                                 double tol) {
    if (!(x >= 0.0)) throw std::invalid_argument("phi_prime_series: x must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("phi_prime_series: tol must be > 0");
    if (x == 0.0) return SeriesEval{0.0, true, 0, 0.0};

    const double c = order.one_plus_alpha();
    const double z = -std::pow(x, c) / c;
    const double xa = std::pow(x, order.alpha());
    // sum_{n>=1} n b_n z^{n-1}, then scale by -x^a
    double term = ratio(1);
    double sum = term;
    double max_mag = std::fabs(term);
    int n = 1;
    bool decaying = false;
    while (n < kTermCap) {
        const double prev = std::fabs(term);
        term *= z * ratio(n + 1) * (static_cast<double>(n + 1) / static_cast<double>(n));
        sum += term;
        ++n;
        const double mag = std::fabs(term);
        max_mag = std::max({max_mag, std::fabs(sum), mag});
        if (mag > kOverflowGuard) return SeriesEval{-xa * sum, false, n, std::fabs(xa * sum)};
        if (mag < prev) decaying = true;
        if (decaying && mag < tol) break;
    }
    if (n >= kTermCap)
        throw ComputationError("phi_prime_series: no convergence within " +
                               std::to_string(kTermCap) + " terms at x = " + format_double(x));
    const double cancel = max_mag / (std::fabs(sum) + tol);
    return SeriesEval{-xa * sum, cancel <= kCancelThreshold, n,
                      xa * (tol + 4.0 * max_mag * std::numeric_limits<double>::epsilon())};
}

// 4-point Lagrange resampling from a uniform table v[i] at x_i = i h.
double resample_cubic(const std::vector<double>& v, double h, double x) {
    const std::size_t n = v.size();
    auto i = static_cast<std::ptrdiff_t>(std::floor(x / h)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 4);
    const double t = x / h - static_cast<double>(i);
    const double l0 = (t - 1.0) * (t - 2.0) * (t - 3.0) / -6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = t * (t - 1.0) * (t - 3.0) / -2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    const auto u = static_cast<std::size_t>(i);
    return l0 * v[u] + l1 * v[u + 1] + l2 * v[u + 2] + l3 * v[u + 3];
}

}  // namespace

double ml_coefficient(const FracOrder& order, int n) {
    if (n < 0) throw std::invalid_argument("ml_coefficient: n must be >= 0");
    if (n == 0) return 1.0;
    const double c = order.one_plus_alpha();
    const double a = order.alpha();
    double log_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ci = c * static_cast<double>(i);
        log_b += std::lgamma(ci + 2.0) - std::lgamma(ci + a + 2.0);
    }
    return std::exp(log_b);
}

SeriesEval phi_series(const FracOrder& order, double x, double tol) {
    CoeffRatios ratios(order);
    return phi_series_impl(ratios, order, x, tol);
}

SeriesEval phi_prime_series(const FracOrder& order, double x, double tol) {
    CoeffRatios ratios(order);
    return phi_prime_series_impl(ratios, order, x, tol);
}

double ProfileTable::interpolate_phi(double x) const {
    const std::size_t i = grid.locate(x);
    const double x0 = grid[i], x1 = grid[i + 1];
    const double w = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
    return phi[i] + w * (phi[i + 1] - phi[i]);
}

double ProfileTable::interpolate_phi_prime(double x) const {
    const std::size_t i = grid.locate(x);
    const double x0 = grid[i], x1 = grid[i + 1];
    const double w = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
    return phi_prime[i] + w * (phi_prime[i + 1] - phi_prime[i]);
}

void ProfileTable::validate() const {
    const std::size_t n = grid.size();
    if (phi.size() != n || method.size() != n || est_error.size() != n || phi_prime.size() != n)
        throw InvariantViolation("ProfileTable: column lengths disagree with the grid");
    if (phi[0] != 1.0) throw InvariantViolation("ProfileTable: phi[0] must be 1");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(phi[i] > 0.0))
            throw InvariantViolation("ProfileTable: phi not strictly positive at x = " +
                                     format_double(grid[i]));
        if (i > 0 && phi[i] > phi[i - 1])
            throw InvariantViolation("ProfileTable: phi not non-increasing at x = " +
                                     format_double(grid[i]));
        if (grid[i] > 0.0 && grid[i] * phi[i] > 4.0)
            throw InvariantViolation("ProfileTable: x*phi exceeds 4 at x = " +
                                     format_double(grid[i]));
    }
    if (derivative_filled) {
        if (phi_prime[0] != 0.0) throw InvariantViolation("ProfileTable: phi_prime[0] must be 0");
        for (std::size_t i = 0; i < n; ++i)
            if (!(phi_prime[i] <= 0.0))
                throw InvariantViolation("ProfileTable: phi_prime positive at x = " +
                                         format_double(grid[i]));
    }
}

void ProfileTable::write_csv(std::ostream& out) const {
    out << "x,phi,phi_prime,method,est_error\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid[i]) << ',' << format_double(phi[i]) << ','
            << format_double(phi_prime[i]) << ','
            << (method[i] == ProfileMethod::Series ? "series" : "volterra") << ','
            << format_double(est_error[i]) << '\n';
    }
}

ProfileTable phi_volterra(const FracOrder& order, const RadialGrid& grid) {
    const double a = order.alpha();
    const double c0 = 1.0 / (std::tgamma(a) * order.one_plus_alpha());
    const auto& x = grid.nodes();
    const std::size_t n = x.size();
    std::vector<double> phi(n), u(n);
    phi[0] = 1.0;
    u[0] = 0.0;

    const bool uniform = grid.is_uniform();
    std::vector<double> Q, R;
    const double h = uniform ? grid.spacing() : 0.0;
    if (uniform) {
        Q.resize(n);
        R.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            Q[i] = std::pow(static_cast<double>(i) * h, a);
            R[i] = Q[i] * (static_cast<double>(i) * h);
        }
    }

    for (std::size_t j = 1; j < n; ++j) {
        const double xj = x[j];
        double known = 0.0;
        for (std::size_t k = 0; k + 1 < j; ++k) {
            double m0, m1;
            const double hk = x[k + 1] - x[k];
            if (uniform) {
                const std::size_t d = j - k;
                m0 = (Q[d] - Q[d - 1]) / a;
                m1 = static_cast<double>(d) * h * m0 - (R[d] - R[d - 1]) / (a + 1.0);
            } else {
                const double Ta = xj - x[k];
                const double Tb = xj - x[k + 1];
                const double dP = detail::pow_diff(Ta, Tb, hk, a);
                const double dR = detail::pow_diff(Ta, Tb, hk, a + 1.0);
                m0 = dP / a;
                m1 = Ta * dP / a - dR / (a + 1.0);
            }
            known += u[k] * m0 + (u[k + 1] - u[k]) / hk * m1;
        }
        // final panel [x_{j-1}, x_j]: the unknown u_j enters linearly
        const double hj = x[j] - x[j - 1];
        const double m0L = std::pow(hj, a) / a;
        const double m1L = std::pow(hj, a + 1.0) / (a * (a + 1.0));
        known += u[j - 1] * (m0L - m1L / hj);
        const double coef = m1L / hj;
        phi[j] = (1.0 - c0 * known) / (1.0 + c0 * coef * xj);
        if (!(phi[j] > 0.0))
            throw ComputationError("phi_volterra: positivity lost at node x = " +
                                   format_double(xj) + " (grid too coarse for alpha = " +
                                   format_double(a) + ")");
        if (phi[j] > phi[j - 1])
            throw ComputationError("phi_volterra: monotonicity lost at node x = " +
                                   format_double(xj));
        u[j] = xj * phi[j];
    }

    return ProfileTable{order,
                        grid,
                        std::move(phi),
                        std::vector<double>(n, 0.0),
                        std::vector<ProfileMethod>(n, ProfileMethod::Volterra),
                        std::vector<double>(n, 0.0),
                        false};
}

namespace detail {

std::vector<double> volterra_march_uniform(const FracOrder& order, double h, std::size_t n) {
    if (n < 4) throw std::invalid_argument("volterra_march_uniform: need at least 4 nodes");
    const double a = order.alpha();
    const double c0 = 1.0 / (std::tgamma(a) * order.one_plus_alpha());

    // Panel moments M_i[d] = int over [s_k, s_k+h] of (s-s_k)^i (x_j-s)^(a-1) ds,
    // d = j - k. Translation invariance keeps the pow() count linear in n.
    std::vector<double> M0(n), M1(n), M2(n);
    {
        std::vector<double> Q(n), R(n), S(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double ih = static_cast<double>(i) * h;
            Q[i] = std::pow(ih, a);
            R[i] = Q[i] * ih;
            S[i] = R[i] * ih;
        }
        for (std::size_t d = 1; d < n; ++d) {
            const double dh = static_cast<double>(d) * h;
            const double A0 = (Q[d] - Q[d - 1]) / a;
            const double A1 = (R[d] - R[d - 1]) / (a + 1.0);
            const double A2 = (S[d] - S[d - 1]) / (a + 2.0);
            M0[d] = A0;
            M1[d] = dh * A0 - A1;
            M2[d] = dh * dh * A0 - 2.0 * dh * A1 + A2;
        }
    }
    const double inv2h = 0.5 / h;
    const double inv2h2 = 0.5 / (h * h);
    const double coef_last = M1[1] * inv2h + M2[1] * inv2h2;  // weight of u_j, last panel

    std::vector<double> phi(n), u(n), d1(n, 0.0), d2(n, 0.0);
    phi[0] = 1.0;
    u[0] = 0.0;

    // first step: linear interpolant on [0, h]
    phi[1] = 1.0 / (1.0 + c0 * (M1[1] / h) * h);
    u[1] = h * phi[1];

    for (std::size_t j = 2; j < n; ++j) {
        const double xj = static_cast<double>(j) * h;
        double known;
        double coef = coef_last;
        if (j == 2) {
            // panel 0 (forward stencil {0,1,2}) also touches the unknown u_2
            known = u[1] * (2.0 * M1[2] / h - M2[2] / (h * h));
            coef += -M1[2] * inv2h + M2[2] * inv2h2;
            known += u[1] * (M0[1] - M2[1] / (h * h));
        } else {
            // panel 0, forward stencil {0,1,2} with u_0 = 0
            known = (4.0 * u[1] - u[2]) * M1[j] * inv2h + (u[2] - 2.0 * u[1]) * M2[j] * inv2h2;
            // interior panels, centred stencils {k-1, k, k+1}
            double acc = 0.0;
            const double* um = u.data();
            const double* d1m = d1.data();
            const double* d2m = d2.data();
            for (std::size_t k = 1; k + 2 <= j; ++k) {
                const std::size_t d = j - k;
                acc += um[k] * M0[d] + d1m[k] * M1[d] + d2m[k] * M2[d];
            }
            known += acc;
            // last panel, backward stencil {j-2, j-1, j}: known part
            known += u[j - 1] * M0[1] - u[j - 2] * M1[1] * inv2h +
                     (u[j - 2] - 2.0 * u[j - 1]) * M2[1] * inv2h2;
        }
        phi[j] = (1.0 - c0 * known) / (1.0 + c0 * coef * xj);
        u[j] = xj * phi[j];
        d1[j - 1] = (u[j] - u[j - 2]) * inv2h;
        d2[j - 1] = (u[j] - 2.0 * u[j - 1] + u[j - 2]) * inv2h2;
    }
    return phi;
}

}  // namespace detail

ProfileTable build_profile(const FracOrder& order, double x_max, double tol,
                           const BuildOptions& options) {
    if (!(x_max > 0.0)) throw std::invalid_argument("build_profile: x_max must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("build_profile: tol must be > 0");
    if (options.n_nodes < 8) throw std::invalid_argument("build_profile: too few nodes");

    RadialGrid grid = options.grading > 1.0
                          ? RadialGrid::graded(x_max, options.n_nodes, options.grading)
                          : RadialGrid::uniform(x_max, options.n_nodes);
    const std::size_t n = grid.size();
    const double tol_series = std::max(tol * 1e-3, 5e-16);

    CoeffRatios ratios(order);
    std::vector<double> phi(n), phi_prime(n, 0.0), est(n, 0.0);
    std::vector<ProfileMethod> method(n, ProfileMethod::Series);

    // series pass up to the first unreliable node
    std::size_t first_unreliable = n;
    for (std::size_t i = 0; i < n; ++i) {
        SeriesEval s = phi_series_impl(ratios, order, grid[i], tol_series);
        if (!s.reliable) {
            first_unreliable = i;
            break;
        }
        phi[i] = s.value;
        est[i] = s.est_error;
    }

    std::size_t crossover = n;  // first node taken from the continuation
    double overlap_max_diff = 0.0;

    if (first_unreliable < n) {
        if (first_unreliable < 3)
            throw ComputationError("build_profile: series unreliable from the origin");
        const double x_reliable = grid[first_unreliable - 1];
        const double x_cross = x_reliable * (1.0 - options.overlap_fraction);
        crossover = first_unreliable;
        while (crossover > 1 && grid[crossover - 1] > x_cross) --crossover;

        // high-order continuation on an internal uniform grid, run at h and h/2;
        // the h/2 values populate the table, the difference is the error estimate
        const std::size_t n_march =
            static_cast<std::size_t>(std::ceil(x_max / options.march_spacing)) + 1;
        const double h = x_max / static_cast<double>(n_march - 1);
        const std::vector<double> coarse = detail::volterra_march_uniform(order, h, n_march);
        const std::vector<double> fine =
            detail::volterra_march_uniform(order, 0.5 * h, 2 * (n_march - 1) + 1);

        for (std::size_t i = crossover; i < first_unreliable; ++i) {
            const double v = resample_cubic(fine, 0.5 * h, grid[i]);
            const double diff = std::fabs(v - phi[i]);
            overlap_max_diff = std::max(overlap_max_diff, diff);
            if (diff > 10.0 * tol) {
                std::ostringstream msg;
                msg << "build_profile: series/volterra disagreement " << format_double(diff)
                    << " at x = " << format_double(grid[i]) << " (series " << format_double(phi[i])
                    << ", volterra " << format_double(v) << ", allowed " << format_double(10.0 * tol)
                    << ")";
                throw ComputationError(msg.str());
            }
        }

        for (std::size_t i = crossover; i < n; ++i) {
            const double v_fine = resample_cubic(fine, 0.5 * h, grid[i]);
            const double v_coarse = resample_cubic(coarse, h, grid[i]);
            phi[i] = v_fine;
            est[i] = std::max(std::fabs(v_fine - v_coarse), 1e-15);
            method[i] = ProfileMethod::Volterra;
        }

        // derivative beyond the crossover: Phi' = -(1+a)^-1 D_C^(1-a)[x Phi] on the
        // internal table (x Phi vanishes at 0, so the RL and Caputo forms coincide)
        {
            RadialGrid mgrid = RadialGrid::uniform(x_max, n_march);
            std::vector<double> uvals(n_march);
            for (std::size_t i = 0; i < n_march; ++i) uvals[i] = mgrid[i] * coarse[i];
            const SampledFunction D =
                caputo_derivative(SampledFunction{mgrid, std::move(uvals)}, 1.0 - order.alpha());
            std::vector<double> dphi(n_march);
            for (std::size_t i = 0; i < n_march; ++i)
                dphi[i] = -D.values[i] / order.one_plus_alpha();
            for (std::size_t i = crossover; i < n; ++i)
                phi_prime[i] = resample_cubic(dphi, h, grid[i]);
        }
    }

    // derivative in the series region from the termwise series
    for (std::size_t i = 1; i < crossover; ++i) {
        SeriesEval d = phi_prime_series_impl(ratios, order, grid[i], tol_series);
        if (!d.reliable)
            throw ComputationError("build_profile: derivative series unreliable inside the "
                                   "series region at x = " +
                                   format_double(grid[i]));
        phi_prime[i] = d.value;
    }
    phi_prime[0] = 0.0;

    for (std::size_t i = crossover; i < n; ++i) est[i] = std::max(est[i], overlap_max_diff);

    // The true Phi' is strictly negative; a positive evaluated value can only
    // be scheme noise near the far end where |Phi'| falls below the L1 error.
    for (std::size_t i = 1; i < n; ++i)
        if (phi_prime[i] > 0.0 && phi_prime[i] < 1e-4) phi_prime[i] = 0.0;

    // truncate once Phi drops below the floor (relevant only as alpha -> 1)
    std::size_t keep = n;
    for (std::size_t i = 1; i < n; ++i) {
        if (phi[i] < options.phi_floor) {
            keep = i;
            break;
        }
    }

    ProfileTable table = [&]() -> ProfileTable {
        if (keep == n)
            return ProfileTable{order,          grid,
                                std::move(phi), std::move(phi_prime),
                                std::move(method), std::move(est),
                                true,           overlap_max_diff};
        std::vector<double> nodes(grid.nodes().begin(),
                                  grid.nodes().begin() + static_cast<std::ptrdiff_t>(keep));
        phi.resize(keep);
        phi_prime.resize(keep);
        method.resize(keep);
        est.resize(keep);
        return ProfileTable{order,
                            RadialGrid::from_nodes(std::move(nodes)),
                            std::move(phi),
                            std::move(phi_prime),
                            std::move(method),
                            std::move(est),
                            true,
                            overlap_max_diff};
    }();

    table.validate();
    return table;
}

}  // namespace fracdecay
