#include "fracdecay/representation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracdecay/errors.hpp"
#include "fracdecay/quadrature.hpp"

namespace fracdecay {

namespace {

double quad_tol_scale(const FundamentalSolution& fs, const InitialDatum& g, double t) {
    const double beta = fs.order().similarity_exponent();
    return fs.a0() * std::pow(t, -beta) * std::max(g.l1_norm(), 1e-30);
}

}  // namespace

double eval_v(const FundamentalSolution& fs, const InitialDatum& g, double x, double t,
              bool plus) {
    if (!(t > 0.0)) throw std::domain_error("eval_v: t must be > 0");
    if (!(x >= 0.0)) throw std::domain_error("eval_v: x must be >= 0");
    const double R = g.support_end();
    if (g.l1_norm() == 0.0) return 0.0;

    std::vector<double> bps = g.breakpoints();
    if (!plus && x > 0.0 && x < R) bps.push_back(x);  // kink of E_t(x-y) at y = x
    std::sort(bps.begin(), bps.end());

    const double scale = quad_tol_scale(fs, g, t);
    auto integrand = [&](double y) {
        const double arg = plus ? x + y : x - y;
        return fs(arg, t) * g(y);
    };
    QuadResult q = integrate_adaptive(integrand, 0.0, R, 1e-10, 1e-13 * scale, bps);
    if (!q.converged)
        throw ComputationError("eval_v: quadrature did not converge (achieved error " +
                               std::to_string(q.error) + " at x = " + std::to_string(x) +
                               ", t = " + std::to_string(t) + ")");
    return q.value;
}

double eval_w1(const FundamentalSolution& fs, const InitialDatum& g, double x, double t) {
    return eval_v(fs, g, x, t, false) - eval_v(fs, g, x, t, true);
}

double eval_w2(const FundamentalSolution& fs, const InitialDatum& g, double x, double t) {
    return eval_v(fs, g, x, t, false) + eval_v(fs, g, x, t, true);
}

SolutionSlice build_slice(const FundamentalSolution& fs, const InitialDatum& g, SliceKind which,
                          double t, const RadialGrid& x_grid) {
    SolutionSlice slice{x_grid, t, which, std::vector<double>(x_grid.size(), 0.0)};
    const double m = g.mass();
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        double v;
        switch (which) {
            case SliceKind::W1:
                v = eval_w1(fs, g, x, t);
                break;
            case SliceKind::W2:
                v = eval_w2(fs, g, x, t);
                break;
            case SliceKind::VPlus:
                v = eval_v(fs, g, x, t, true);
                break;
            case SliceKind::VMinus:
                v = eval_v(fs, g, x, t, false);
                break;
            case SliceKind::W2MinusTwoME:
                v = eval_w2(fs, g, x, t) - 2.0 * m * fs(x, t);
                break;
            default:
                throw std::logic_error("build_slice: unknown slice kind");
        }
        slice.values[i] = v;
    }
    return slice;
}

double lp_norm(const SolutionSlice& slice, double p, std::optional<TailEnvelope> tail) {
    if (!(p > 1.0)) throw std::invalid_argument("lp_norm: p must lie in (1, inf]");
    const auto& x = slice.grid.nodes();
    const auto& v = slice.values;
    const double x_end = x.back();

    if (std::isinf(p)) {
        double mx = 0.0;
        for (double val : v) mx = std::max(mx, std::fabs(val));
        if (tail) {
            const double env_at_end = tail->amplitude * std::pow(x_end, -tail->exponent);
            if (env_at_end > mx)
                throw ComputationError(
                    "lp_norm: envelope beyond the grid (" + std::to_string(env_at_end) +
                    ") could exceed the grid max (" + std::to_string(mx) +
                    "); enlarge the evaluation window");
        }
        return mx;
    }

    double main = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double h = x[i + 1] - x[i];
        main += 0.5 * h * (std::pow(std::fabs(v[i]), p) + std::pow(std::fabs(v[i + 1]), p));
    }
    double tail_part = 0.0;
    if (tail) {
        const double qp = tail->exponent * p;
        if (qp <= 1.0)
            throw ComputationError("lp_norm: envelope tail not integrable for p = " +
                                   std::to_string(p));
        tail_part = std::pow(tail->amplitude, p) * std::pow(x_end, 1.0 - qp) / (qp - 1.0);
    } else {
        // without an envelope the slice itself must have decayed
        const double last = std::fabs(v.back());
        tail_part = std::pow(last, p) * x_end;  // crude ceiling assuming ~1/x decay
    }
    if (tail_part > 0.25 * main)
        throw ComputationError("lp_norm: tail contribution " + std::to_string(tail_part) +
                               " not negligible against " + std::to_string(main) +
                               "; enlarge the evaluation window");
    return std::pow(main + tail_part, 1.0 / p);
}

RadialGrid make_eval_grid(double fine_end, double x_big, std::size_t n_fine,
                          std::size_t n_stretch) {
    if (!(fine_end > 0.0) || !(x_big > fine_end))
        throw std::invalid_argument("make_eval_grid: need 0 < fine_end < x_big");
    std::vector<double> nodes;
    nodes.reserve(n_fine + n_stretch + 1);
    for (std::size_t i = 0; i < n_fine; ++i)
        nodes.push_back(fine_end * static_cast<double>(i) / static_cast<double>(n_fine));
    const double ratio = std::pow(x_big / fine_end, 1.0 / static_cast<double>(n_stretch));
    double xcur = fine_end;
    for (std::size_t i = 0; i < n_stretch; ++i) {
        nodes.push_back(xcur);
        xcur *= ratio;
    }
    nodes.push_back(x_big);
    return RadialGrid::from_nodes(std::move(nodes));
}

}  // namespace fracdecay
