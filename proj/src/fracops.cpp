#include "fracdecay/fracops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fracdecay/errors.hpp"

namespace fracdecay {

namespace {

void check_order(double order, const char* who) {
    if (!(order > 0.0) || !(order < 1.0))
        throw std::invalid_argument(std::string(who) + ": order must lie in (0,1), got " +
                                    std::to_string(order));
}

// Compensated accumulator; fixed summation order keeps results reproducible.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) noexcept {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double get() const noexcept { return s; }
};

}  // namespace

namespace detail {

double pow_diff(double a, double b, double d, double mu) {
    if (b <= 0.0) return std::pow(a, mu);
    if (b > 0.5 * a) {
        // b^mu * expm1(mu * log(a/b)) with log(a/b) = log1p(d/b)
        return std::pow(b, mu) * std::expm1(mu * std::log1p(d / b));
    }
    return std::pow(a, mu) - std::pow(b, mu);
}

}  // namespace detail

SampledFunction SampledFunction::make(RadialGrid grid, std::vector<double> values) {
    if (values.size() != grid.size())
        throw InvariantViolation("SampledFunction: values length must equal node count");
    for (double v : values)
        if (!std::isfinite(v)) throw InvariantViolation("SampledFunction: non-finite value");
    return SampledFunction{std::move(grid), std::move(values)};
}

SampledFunction rl_integral(const SampledFunction& f, double order) {
    check_order(order, "rl_integral");
    const double a = order;
    const auto& x = f.grid.nodes();
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    const double inv_gamma = 1.0 / std::tgamma(a);

    if (f.grid.is_uniform()) {
        const double h = f.grid.spacing();
        // Q[i] = (i h)^a, R[i] = (i h)^(a+1); panel moments become table lookups.
        std::vector<double> Q(n), R(n);
        for (std::size_t i = 0; i < n; ++i) {
            Q[i] = std::pow(static_cast<double>(i) * h, a);
            R[i] = Q[i] * (static_cast<double>(i) * h);
        }
        for (std::size_t j = 1; j < n; ++j) {
            KahanSum acc;
            for (std::size_t k = 0; k < j; ++k) {
                const std::size_t d = j - k;
                const double Ta = static_cast<double>(d) * h;
                const double m0 = (Q[d] - Q[d - 1]) / a;
                const double m1 = (Ta * (Q[d] - Q[d - 1])) / a - (R[d] - R[d - 1]) / (a + 1.0);
                acc.add(f.values[k] * m0 + (f.values[k + 1] - f.values[k]) / h * m1);
            }
            out[j] = inv_gamma * acc.get();
        }
        return SampledFunction{f.grid, std::move(out)};
    }

    for (std::size_t j = 1; j < n; ++j) {
        const double xj = x[j];
        KahanSum acc;
        for (std::size_t k = 0; k < j; ++k) {
            const double Ta = xj - x[k];
            const double Tb = xj - x[k + 1];
            const double hk = x[k + 1] - x[k];
            const double dP = detail::pow_diff(Ta, Tb, hk, a);       // Ta^a - Tb^a
            const double dR = detail::pow_diff(Ta, Tb, hk, a + 1.0); // Ta^(a+1) - Tb^(a+1)
            const double m0 = dP / a;
            const double m1 = Ta * dP / a - dR / (a + 1.0);
            acc.add(f.values[k] * m0 + (f.values[k + 1] - f.values[k]) / hk * m1);
        }
        out[j] = inv_gamma * acc.get();
    }
    return SampledFunction{f.grid, std::move(out)};
}

SampledFunction caputo_derivative(const SampledFunction& f, double order) {
    check_order(order, "caputo_derivative");
    const double mu = 1.0 - order;  // kernel moment exponent
    const auto& x = f.grid.nodes();
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    const double inv_gamma = 1.0 / std::tgamma(2.0 - order);

    if (f.grid.is_uniform()) {
        const double h = f.grid.spacing();
        std::vector<double> Q(n), slope(n - 1);
        for (std::size_t i = 0; i < n; ++i) Q[i] = std::pow(static_cast<double>(i) * h, mu);
        for (std::size_t k = 0; k + 1 < n; ++k) slope[k] = (f.values[k + 1] - f.values[k]) / h;
        for (std::size_t j = 1; j < n; ++j) {
            KahanSum acc;
            for (std::size_t k = 0; k < j; ++k) acc.add(slope[k] * (Q[j - k] - Q[j - k - 1]));
            out[j] = inv_gamma * acc.get();
        }
        return SampledFunction{f.grid, std::move(out)};
    }

    for (std::size_t j = 1; j < n; ++j) {
        const double xj = x[j];
        KahanSum acc;
        for (std::size_t k = 0; k < j; ++k) {
            const double hk = x[k + 1] - x[k];
            const double dP = detail::pow_diff(xj - x[k], xj - x[k + 1], hk, mu);
            acc.add((f.values[k + 1] - f.values[k]) / hk * dP);
        }
        out[j] = inv_gamma * acc.get();
    }
    return SampledFunction{f.grid, std::move(out)};
}

SampledFunction rl_derivative(const SampledFunction& f, double order) {
    check_order(order, "rl_derivative");
    SampledFunction out = caputo_derivative(f, order);
    const double f0 = f.values[0];
    if (f0 != 0.0) {
        const double inv_gamma = 1.0 / std::tgamma(1.0 - order);
        const auto& x = f.grid.nodes();
        out.values[0] = f0 > 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j < x.size(); ++j)
            out.values[j] += f0 * std::pow(x[j], -order) * inv_gamma;
    }
    return out;
}

}  // namespace fracdecay
