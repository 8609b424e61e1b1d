#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

struct ForecastResult {
    std::vector<double> predicted; // model output per row
    std::vector<double> change;    // predicted - current
    double mean_change = 0.0;      // signed
    std::size_t negative_count = 0; // predictions below zero, preserved as-is
};

// One-step-ahead forecast: apply the trained model to the final-year feature
// rows. Negative predicted areas are kept and counted, not clamped.
ForecastResult forecast_next_year(const Model& model, const Matrix& x,
                                  std::span<const double> current_area);

} // namespace coastcast
