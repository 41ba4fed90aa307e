#include "fracdecay/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracdecay/errors.hpp"

namespace fracdecay {

RadialGrid::RadialGrid(std::vector<double> nodes, GridKind kind, double gamma)
    : nodes_(std::move(nodes)), kind_(kind), gamma_(gamma) {
    check_invariants();
    if (kind_ == GridKind::Uniform) spacing_ = nodes_[1] - nodes_[0];
}

void RadialGrid::check_invariants() const {
    if (nodes_.size() < 2)
        throw InvariantViolation("RadialGrid: need at least 2 nodes");
    if (nodes_.front() != 0.0)
        throw InvariantViolation("RadialGrid: first node must be 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1]))
            throw InvariantViolation("RadialGrid: nodes must be strictly increasing (node " +
                                     std::to_string(i) + ")");
        if (!std::isfinite(nodes_[i]))
            throw InvariantViolation("RadialGrid: non-finite node");
    }
}

RadialGrid RadialGrid::uniform(double x_max, std::size_t n_nodes) {
    if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid::uniform: x_max must be > 0");
    if (n_nodes < 2) throw std::invalid_argument("RadialGrid::uniform: need at least 2 nodes");
    std::vector<double> nodes(n_nodes);
    const double h = x_max / static_cast<double>(n_nodes - 1);
    for (std::size_t j = 0; j < n_nodes; ++j) nodes[j] = h * static_cast<double>(j);
    nodes.back() = x_max;
    return RadialGrid(std::move(nodes), GridKind::Uniform, 1.0);
}

RadialGrid RadialGrid::graded(double x_max, std::size_t n_nodes, double gamma) {
    if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid::graded: x_max must be > 0");
    if (n_nodes < 2) throw std::invalid_argument("RadialGrid::graded: need at least 2 nodes");
    if (!(gamma >= 1.0)) throw std::invalid_argument("RadialGrid::graded: gamma must be >= 1");
    std::vector<double> nodes(n_nodes);
    const double n1 = static_cast<double>(n_nodes - 1);
    for (std::size_t j = 0; j < n_nodes; ++j)
        nodes[j] = x_max * std::pow(static_cast<double>(j) / n1, gamma);
    nodes.back() = x_max;
    return RadialGrid(std::move(nodes), GridKind::Graded, gamma);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
    return RadialGrid(std::move(nodes), GridKind::Explicit, 1.0);
}

std::size_t RadialGrid::locate(double x) const {
    const std::size_t last_panel = nodes_.size() - 2;
    if (x <= 0.0) return 0;
    if (x >= nodes_.back()) return last_panel;
    std::size_t i;
    switch (kind_) {
        case GridKind::Uniform:
            i = static_cast<std::size_t>(x / spacing_);
            break;
        case GridKind::Graded: {
            const double n1 = static_cast<double>(nodes_.size() - 1);
            i = static_cast<std::size_t>(std::pow(x / nodes_.back(), 1.0 / gamma_) * n1);
            break;
        }
        default:
            i = static_cast<std::size_t>(
                    std::upper_bound(nodes_.begin(), nodes_.end(), x) - nodes_.begin()) -
                1;
    }
    i = std::min(i, last_panel);
    // guard against rounding in the analytic inversions
    while (i > 0 && x < nodes_[i]) --i;
    while (i < last_panel && x >= nodes_[i + 1]) ++i;
    return i;
}

}  // namespace fracdecay
