#include "coastcast/cqr.hpp"

#include <algorithm>
#include <cmath>

#include "coastcast/error.hpp"

namespace coastcast {

double cqr_offset(std::vector<double> scores, double alpha) {
    const std::size_t n = scores.size();
    if (n == 0) raise(errc::calibration_too_small, "empty calibration set");
    if (!(alpha > 0.0 && alpha < 1.0)) raise(errc::bad_argument, "alpha outside (0,1)");
    const double raw = (1.0 - alpha) * static_cast<double>(n + 1);
    const std::size_t rank = static_cast<std::size_t>(std::ceil(raw));
    if (rank > n) {
        raise(errc::calibration_too_small,
              "need rank " + std::to_string(rank) + " but only " +
                  std::to_string(n) + " calibration scores");
    }
    std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     scores.end());
    return scores[rank - 1];
}

double cqr_calibrate(const Model& q_lo, const Model& q_hi, const Matrix& x_cal,
                     std::span<const double> y_cal, double alpha) {
    if (x_cal.rows() != y_cal.size()) {
        raise(errc::bad_argument, "cqr_calibrate: size mismatch");
    }
    std::vector<double> scores;
    scores.reserve(y_cal.size());
    for (std::size_t i = 0; i < y_cal.size(); ++i) {
        const double lo = q_lo.predict_row(x_cal.row(i));
        const double hi = q_hi.predict_row(x_cal.row(i));
        scores.push_back(std::max(lo - y_cal[i], y_cal[i] - hi));
    }
    return cqr_offset(std::move(scores), alpha);
}

PredictionIntervals cqr_intervals(const Model& q_lo, const Model& q_hi,
                                  const Matrix& x, double q, double alpha) {
    PredictionIntervals out;
    out.alpha = alpha;
    out.lower.reserve(x.rows());
    out.upper.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double lo = q_lo.predict_row(x.row(i)) - q;
        const double hi = q_hi.predict_row(x.row(i)) + q;
        out.lower.push_back(lo);
        out.upper.push_back(std::max(lo, hi));
    }
    return out;
}

double coverage(const PredictionIntervals& intervals, std::span<const double> y) {
    if (intervals.lower.size() != y.size() || y.empty()) {
        raise(errc::bad_argument, "coverage: size mismatch or empty");
    }
    std::size_t covered = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (intervals.lower[i] <= y[i] && y[i] <= intervals.upper[i]) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(y.size());
}

} // namespace coastcast
