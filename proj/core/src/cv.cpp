#include "coastcast/cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coastcast/error.hpp"
#include "coastcast/rng.hpp"

namespace coastcast {

std::vector<std::vector<std::size_t>> kfold_assignment(std::size_t n,
                                                       std::size_t splits,
                                                       std::uint64_t seed,
                                                       std::size_t repeat) {
    if (splits < 2 || n < splits) {
        raise(errc::bad_argument, "kfold needs 2 <= splits <= rows");
    }
    Rng rng = Rng(seed).fork(repeat);
    const std::vector<std::size_t> perm = rng.permutation(n);

    std::vector<std::vector<std::size_t>> folds(splits);
    const std::size_t base = n / splits;
    const std::size_t extra = n % splits;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < splits; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                        perm.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
    }
    return folds;
}

namespace {

void gather(const Matrix& x, std::span<const double> y,
            const std::vector<std::size_t>& rows, Matrix& xs,
            std::vector<double>& ys) {
    xs = Matrix(rows.size(), x.cols());
    ys.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) xs(i, j) = x(rows[i], j);
        ys[i] = y[rows[i]];
    }
}

} // namespace

ScoreReport repeated_kfold(const ModelSpec& spec, const Matrix& x,
                           std::span<const double> y, std::size_t splits,
                           std::size_t repeats, std::uint64_t seed) {
    const std::size_t n = x.rows();
    ScoreReport report;
    report.model = model_kind_name(spec.kind);
    report.input_variant = "scaled";
    report.folds.reserve(splits * repeats);

    for (std::size_t rep = 0; rep < repeats; ++rep) {
        const auto folds = kfold_assignment(n, splits, seed, rep);
        for (const auto& val_rows : folds) {
            std::vector<std::uint8_t> in_val(n, 0);
            for (std::size_t r : val_rows) in_val[r] = 1;
            std::vector<std::size_t> train_rows;
            train_rows.reserve(n - val_rows.size());
            for (std::size_t r = 0; r < n; ++r) {
                if (!in_val[r]) train_rows.push_back(r);
            }

            Matrix xt, xv;
            std::vector<double> yt, yv;
            gather(x, y, train_rows, xt, yt);
            gather(x, y, val_rows, xv, yv);

            try {
                const auto model = fit_model(spec, xt, yt);
                const std::vector<double> pred = predict(*model, xv);
                const Scores s = metrics(yv, pred);
                report.folds.push_back(FoldScore{s.mse, s.mae, s.r2});
            } catch (const Error& e) {
                // a budget-capped solver loses the fold, not the report
                if (e.code() != errc::no_convergence) throw;
                ++report.failed_folds;
            }
        }
    }
    return report;
}

std::vector<LearningCurvePoint> learning_curve(const ModelSpec& spec,
                                               const Matrix& x,
                                               std::span<const double> y,
                                               std::span<const double> fractions,
                                               std::uint64_t seed,
                                               double val_ratio) {
    const std::size_t n = x.rows();
    if (n < 4) raise(errc::bad_argument, "learning_curve: too few rows");
    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.permutation(n);
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                     val_ratio * static_cast<double>(n))));
    const std::size_t n_pool = n - n_val;

    std::vector<std::size_t> pool(perm.begin(),
                                  perm.begin() + static_cast<std::ptrdiff_t>(n_pool));
    std::vector<std::size_t> val(perm.begin() + static_cast<std::ptrdiff_t>(n_pool),
                                 perm.end());

    Matrix xv;
    std::vector<double> yv;
    gather(x, y, val, xv, yv);

    std::vector<LearningCurvePoint> out;
    for (double frac : fractions) {
        std::size_t s = static_cast<std::size_t>(
            std::llround(frac * static_cast<double>(n_pool)));
        s = std::clamp<std::size_t>(s, std::min<std::size_t>(2, n_pool), n_pool);
        std::vector<std::size_t> subset(pool.begin(),
                                        pool.begin() + static_cast<std::ptrdiff_t>(s));
        Matrix xs;
        std::vector<double> ys;
        gather(x, y, subset, xs, ys);

        try {
            const auto model = fit_model(spec, xs, ys);
            const Scores train_s = metrics(ys, predict(*model, xs));
            const Scores val_s = metrics(yv, predict(*model, xv));
            out.push_back(LearningCurvePoint{frac, s, train_s.r2, val_s.r2});
        } catch (const Error& e) {
            if (e.code() != errc::no_convergence) throw;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            out.push_back(LearningCurvePoint{frac, s, nan, nan});
        }
    }
    return out;
}

} // namespace coastcast
