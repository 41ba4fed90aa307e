#pragma once

#include <stdexcept>
#include <string>

namespace fracdecay {

// Order alpha of the spatial Caputo derivative, restricted to (0,1),
// together with the similarity exponent 1/(1+alpha) that governs every
// space/time scaling in the model.
class FracOrder {
public:
    explicit FracOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !(alpha < 1.0))
            throw std::invalid_argument(
                "FracOrder: alpha must lie in the open interval (0,1), got " +
                std::to_string(alpha));
        similarity_exponent_ = 1.0 / (1.0 + alpha);
    }

    double alpha() const noexcept { return alpha_; }
    double one_plus_alpha() const noexcept { return 1.0 + alpha_; }
    double similarity_exponent() const noexcept { return similarity_exponent_; }

private:
    double alpha_;
    double similarity_exponent_;
};

}  // namespace fracdecay
