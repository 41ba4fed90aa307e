#pragma once

#include <iosfwd>
#include <vector>

namespace fracdecay {

enum class DatumKind { Indicator, Triangle, SmoothBump, Tabulated };

// Compactly supported initial datum g on [0, R] with its mass and first
// moment precomputed (closed form for the builtins, exact trapezoid for
// tabulated data, adaptive quadrature for the bump).
class InitialDatum {
public:
    static InitialDatum indicator(double a, double b);
    static InitialDatum triangle(double a, double b);
    static InitialDatum smooth_bump(double a, double b);
    static InitialDatum tabulated(std::vector<double> y, std::vector<double> g);
    static InitialDatum from_csv(std::istream& in);  // two columns y,g

    double operator()(double y) const;

    DatumKind kind() const noexcept { return kind_; }
    double support_end() const noexcept { return support_end_; }      // R
    double mass() const noexcept { return mass_; }                    // int g
    double first_moment() const noexcept { return first_moment_; }    // int y |g|
    double l1_norm() const noexcept { return l1_norm_; }              // int |g|

    // Panel boundaries any quadrature against g must respect.
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

private:
    InitialDatum() = default;

    DatumKind kind_ = DatumKind::Indicator;
    double lo_ = 0.0, hi_ = 0.0;
    double support_end_ = 0.0;
    double mass_ = 0.0, first_moment_ = 0.0, l1_norm_ = 0.0;
    std::vector<double> breakpoints_;
    std::vector<double> ys_, gs_;  // tabulated only
};

}  // namespace fracdecay
