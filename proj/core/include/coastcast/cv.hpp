#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

// Balanced fold assignment: fold f of a shuffled permutation; sizes differ
// by at most one. Deterministic for a given (seed, repeat).
std::vector<std::vector<std::size_t>> kfold_assignment(std::size_t n,
                                                       std::size_t splits,
                                                       std::uint64_t seed,
                                                       std::size_t repeat);

// splits x repeats fold scores; every row is validated exactly once per
// repeat. Fold assignments depend only on (n, splits, seed), so different
// model specs evaluated with the same seed share folds.
ScoreReport repeated_kfold(const ModelSpec& spec, const Matrix& x,
                           std::span<const double> y, std::size_t splits = 10,
                           std::size_t repeats = 10, std::uint64_t seed = 0);

struct LearningCurvePoint {
    double fraction = 0.0;
    std::size_t n_train = 0;
    double train_r2 = 0.0;
    double val_r2 = 0.0;
};

// Single shuffled holdout; for each fraction the model is fit on the first
// round(fraction * pool) rows of the training pool and scored on both those
// rows and the fixed validation split.
std::vector<LearningCurvePoint> learning_curve(const ModelSpec& spec,
                                               const Matrix& x,
                                               std::span<const double> y,
                                               std::span<const double> fractions,
                                               std::uint64_t seed,
                                               double val_ratio = 0.2);

} // namespace coastcast
