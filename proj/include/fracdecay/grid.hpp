#pragma once

#include <cstddef>
#include <vector>

namespace fracdecay {

enum class GridKind { Uniform, Graded, Explicit };

// Radial grid in the similarity variable: strictly increasing nodes with
// nodes[0] == 0. Graded grids x_j = x_max (j/N)^gamma cluster nodes near the
// origin to resolve the x^alpha behaviour of the profile derivative.
class RadialGrid {
public:
    static RadialGrid uniform(double x_max, std::size_t n_nodes);
    static RadialGrid graded(double x_max, std::size_t n_nodes, double gamma);
    static RadialGrid from_nodes(std::vector<double> nodes);

    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const noexcept { return nodes_[i]; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double x_max() const noexcept { return nodes_.back(); }
    GridKind kind() const noexcept { return kind_; }
    double grading() const noexcept { return gamma_; }

    // Uniform spacing; only meaningful when kind() == Uniform.
    double spacing() const noexcept { return spacing_; }
    bool is_uniform() const noexcept { return kind_ == GridKind::Uniform; }

    // Index i with nodes[i] <= x < nodes[i+1], clamped to [0, size()-2].
    // O(1) for uniform and graded grids, O(log n) otherwise.
    std::size_t locate(double x) const;

private:
    RadialGrid(std::vector<double> nodes, GridKind kind, double gamma);
    void check_invariants() const;

    std::vector<double> nodes_;
    GridKind kind_;
    double gamma_ = 1.0;
    double spacing_ = 0.0;
};

}  // namespace fracdecay
