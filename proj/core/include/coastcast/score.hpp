#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace coastcast {

struct Scores {
    double mse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
};

struct FoldScore {
    double mse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
};

// Per-fold cross-validation scores for one (model, input variant) pair.
struct ScoreReport {
    std::string model;         // "ols", "svr", "gbt", "rf"
    std::string input_variant; // "scaled", "rfe(n)", "pca(k)"
    std::vector<FoldScore> folds;
    // folds whose solver exhausted its budget; excluded from the lists above
    std::size_t failed_folds = 0;

    std::vector<double> r2_list() const {
        std::vector<double> out;
        out.reserve(folds.size());
        for (const FoldScore& f : folds) out.push_back(f.r2);
        return out;
    }

    double mean_r2() const {
        double s = 0.0;
        for (const FoldScore& f : folds) s += f.r2;
        return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
    }

    double mean_mse() const {
        double s = 0.0;
        for (const FoldScore& f : folds) s += f.mse;
        return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
    }

    double mean_mae() const {
        double s = 0.0;
        for (const FoldScore& f : folds) s += f.mae;
        return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
    }

    double std_r2() const {
        if (folds.size() < 2) return 0.0;
        const double m = mean_r2();
        double ss = 0.0;
        for (const FoldScore& f : folds) ss += (f.r2 - m) * (f.r2 - m);
        return std::sqrt(ss / static_cast<double>(folds.size() - 1));
    }
};

} // namespace coastcast
