#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

struct ShapleyResult {
    std::vector<double> phi;
    double base_value = 0.0; // v(empty) = mean model output over background
};

// Exact Shapley attribution over all 2^d coalitions with the interventional
// value function v(S) = mean over background rows b of model(x_S, b_rest).
// Efficiency holds by construction: sum(phi) = model(x) - base_value.
// Guarded at d > 15 (2^d coalition enumeration).
ShapleyResult shapley_exact(const Model& model, std::span<const double> x,
                            const Matrix& background);

} // namespace coastcast
