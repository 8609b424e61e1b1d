#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

struct PredictionIntervals {
    std::vector<double> lower;
    std::vector<double> upper;
    double alpha = 0.1;
};

// Split-conformal offset: Q is the ceil((1-alpha)(n+1))-th smallest
// conformity score E_i = max(qlo(x_i) - y_i, y_i - qhi(x_i)). Throws
// calibration_too_small when that index exceeds n.
double cqr_offset(std::vector<double> scores, double alpha);

double cqr_calibrate(const Model& q_lo, const Model& q_hi, const Matrix& x_cal,
                     std::span<const double> y_cal, double alpha = 0.1);

// [qlo - Q, qhi + Q]; a crossed pair collapses to a point at the lower bound.
PredictionIntervals cqr_intervals(const Model& q_lo, const Model& q_hi,
                                  const Matrix& x, double q, double alpha = 0.1);

double coverage(const PredictionIntervals& intervals, std::span<const double> y);

} // namespace coastcast
