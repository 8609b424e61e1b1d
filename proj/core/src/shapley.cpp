#include "coastcast/shapley.hpp"

#include <cmath>

#include "coastcast/error.hpp"

namespace coastcast {

ShapleyResult shapley_exact(const Model& model, std::span<const double> x,
                            const Matrix& background) {
    const std::size_t d = x.size();
    if (d == 0 || background.rows() == 0 || background.cols() != d) {
        raise(errc::bad_argument, "shapley_exact: bad inputs");
    }
    if (d > 15) {
        raise(errc::too_many_features,
              "exact enumeration over 2^" + std::to_string(d) + " coalitions");
    }

    const std::size_t n_masks = std::size_t{1} << d;
    const double n_bg = static_cast<double>(background.rows());

    // v(S): replace the coordinates in S with x, average over background rows.
    std::vector<double> v(n_masks, 0.0);
    std::vector<double> composite(d);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        double sum = 0.0;
        for (std::size_t b = 0; b < background.rows(); ++b) {
            const auto row = background.row(b);
            for (std::size_t j = 0; j < d; ++j) {
                composite[j] = (mask >> j) & 1 ? x[j] : row[j];
            }
            sum += model.predict_row(composite);
        }
        v[mask] = sum / n_bg;
    }

    // weights s!(d-1-s)!/d! indexed by |S|
    std::vector<double> factorial(d + 1, 1.0);
    for (std::size_t i = 1; i <= d; ++i) {
        factorial[i] = factorial[i - 1] * static_cast<double>(i);
    }
    std::vector<double> weight(d, 0.0);
    for (std::size_t s = 0; s < d; ++s) {
        weight[s] = factorial[s] * factorial[d - 1 - s] / factorial[d];
    }

    ShapleyResult result;
    result.base_value = v[0];
    result.phi.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const std::size_t s = static_cast<std::size_t>(__builtin_popcountll(mask));
            result.phi[j] += weight[s] * (v[mask | bit] - v[mask]);
        }
    }
    return result;
}

} // namespace coastcast
