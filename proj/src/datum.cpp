#include "fracdecay/datum.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracdecay/errors.hpp"
#include "fracdecay/quadrature.hpp"

namespace fracdecay {

namespace {

void check_support(double a, double b, const char* who) {
    if (!(a >= 0.0) || !(b > a) || !std::isfinite(b))
        throw std::invalid_argument(std::string(who) + ": need 0 <= a < b < inf, got [" +
                                    std::to_string(a) + ", " + std::to_string(b) + "]");
}

double bump_shape(double u) {
    if (std::fabs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace

InitialDatum InitialDatum::indicator(double a, double b) {
    check_support(a, b, "InitialDatum::indicator");
    InitialDatum d;
    d.kind_ = DatumKind::Indicator;
    d.lo_ = a;
    d.hi_ = b;
    d.support_end_ = b;
    d.mass_ = b - a;
    d.first_moment_ = 0.5 * (b * b - a * a);
    d.l1_norm_ = d.mass_;
    d.breakpoints_ = {a, b};
    return d;
}

InitialDatum InitialDatum::triangle(double a, double b) {
    check_support(a, b, "InitialDatum::triangle");
    InitialDatum d;
    d.kind_ = DatumKind::Triangle;
    d.lo_ = a;
    d.hi_ = b;
    d.support_end_ = b;
    d.mass_ = 0.5 * (b - a);
    d.first_moment_ = d.mass_ * 0.5 * (a + b);  // centroid of the symmetric hat
    d.l1_norm_ = d.mass_;
    d.breakpoints_ = {a, 0.5 * (a + b), b};
    return d;
}

InitialDatum InitialDatum::smooth_bump(double a, double b) {
    check_support(a, b, "InitialDatum::smooth_bump");
    InitialDatum d;
    d.kind_ = DatumKind::SmoothBump;
    d.lo_ = a;
    d.hi_ = b;
    d.support_end_ = b;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double y) { return bump_shape((y - mid) / half); };
    d.mass_ = integrate_adaptive(g, a, b, 1e-13, 1e-15).value;
    d.first_moment_ = integrate_adaptive([&](double y) { return y * g(y); }, a, b, 1e-13, 1e-15).value;
    d.l1_norm_ = d.mass_;
    d.breakpoints_ = {a, mid, b};
    return d;
}

InitialDatum InitialDatum::tabulated(std::vector<double> y, std::vector<double> g) {
    if (y.size() != g.size() || y.size() < 2)
        throw std::invalid_argument("InitialDatum::tabulated: need matching columns, >= 2 rows");
    if (!(y.front() >= 0.0))
        throw std::invalid_argument("InitialDatum::tabulated: support must lie in [0, inf)");
    for (std::size_t i = 1; i < y.size(); ++i)
        if (!(y[i] > y[i - 1]))
            throw std::invalid_argument("InitialDatum::tabulated: y must be strictly increasing");
    for (double v : g)
        if (!std::isfinite(v)) throw std::invalid_argument("InitialDatum::tabulated: non-finite g");

    InitialDatum d;
    d.kind_ = DatumKind::Tabulated;
    d.lo_ = y.front();
    d.hi_ = y.back();
    d.support_end_ = y.back();
    // trapezoid is exact for the piecewise-linear interpretation
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const double h = y[i + 1] - y[i];
        d.mass_ += 0.5 * h * (g[i] + g[i + 1]);
        d.first_moment_ += 0.5 * h * (y[i] * std::fabs(g[i]) + y[i + 1] * std::fabs(g[i + 1]));
        d.l1_norm_ += 0.5 * h * (std::fabs(g[i]) + std::fabs(g[i + 1]));
    }
    if (y.size() <= 64) {
        d.breakpoints_ = y;
    } else {
        d.breakpoints_ = {y.front(), y.back()};
    }
    d.ys_ = std::move(y);
    d.gs_ = std::move(g);
    return d;
}

InitialDatum InitialDatum::from_csv(std::istream& in) {
    std::vector<double> ys, gs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.find_first_not_of("yg, \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw ComputationError("InitialDatum::from_csv: malformed row " +
                                   std::to_string(lineno) + ": '" + line + "'");
        try {
            ys.push_back(std::stod(a));
            gs.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ComputationError("InitialDatum::from_csv: non-numeric row " +
                                   std::to_string(lineno) + ": '" + line + "'");
        }
    }
    return tabulated(std::move(ys), std::move(gs));
}

double InitialDatum::operator()(double y) const {
    switch (kind_) {
        case DatumKind::Indicator:
            return (y >= lo_ && y <= hi_) ? 1.0 : 0.0;
        case DatumKind::Triangle: {
            if (y < lo_ || y > hi_) return 0.0;
            return std::max(0.0, 1.0 - std::fabs(2.0 * y - (lo_ + hi_)) / (hi_ - lo_));
        }
        case DatumKind::SmoothBump: {
            const double mid = 0.5 * (lo_ + hi_), half = 0.5 * (hi_ - lo_);
            return bump_shape((y - mid) / half);
        }
        case DatumKind::Tabulated: {
            if (y <= ys_.front() || y >= ys_.back()) {
                if (y == ys_.front()) return gs_.front();
                if (y == ys_.back()) return gs_.back();
                return 0.0;
            }
            const auto it = std::upper_bound(ys_.begin(), ys_.end(), y);
            const std::size_t i = static_cast<std::size_t>(it - ys_.begin()) - 1;
            const double w = (y - ys_[i]) / (ys_[i + 1] - ys_[i]);
            return gs_[i] + w * (gs_[i + 1] - gs_[i]);
        }
    }
    return 0.0;
}

}  // namespace fracdecay
