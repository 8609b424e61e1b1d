#include "coastcast/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "coastcast/error.hpp"
#include "coastcast/features.hpp"
#include "coastcast/rng.hpp"

namespace coastcast {

namespace {

struct SplitChoice {
    bool valid = false;
    int feature = -1;
    double threshold = 0.0;
    double child_sse = 0.0;
};

double subset_sse(std::span<const double> target, const std::vector<std::size_t>& rows) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t r : rows) {
        sum += target[r];
        sq += target[r] * target[r];
    }
    const double n = static_cast<double>(rows.size());
    return sq - sum * sum / n;
}

// Best SSE split of `rows` on one feature; requires min_leaf rows per side.
SplitChoice best_split_on_feature(const Matrix& x, std::span<const double> target,
                                  const std::vector<std::size_t>& rows, int feature,
                                  int min_leaf) {
    SplitChoice best;
    std::vector<std::pair<double, double>> vals; // (feature value, target)
    vals.reserve(rows.size());
    for (std::size_t r : rows) {
        vals.emplace_back(x(r, static_cast<std::size_t>(feature)), target[r]);
    }
    std::sort(vals.begin(), vals.end());

    double total_sum = 0.0;
    for (const auto& [v, t] : vals) total_sum += t;

    const double n = static_cast<double>(vals.size());
    double left_sum = 0.0, left_sq = 0.0;
    double total_sq = 0.0;
    for (const auto& [v, t] : vals) total_sq += t * t;

    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_sum += vals[i].second;
        left_sq += vals[i].second * vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total_sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / nl) +
                           (right_sq - right_sum * right_sum / nr);
        if (!best.valid || sse < best.child_sse) {
            best.valid = true;
            best.feature = feature;
            best.threshold = vals[i].first + (vals[i + 1].first - vals[i].first) / 2.0;
            best.child_sse = sse;
        }
    }
    return best;
}

struct TreeBuilder {
    const Matrix& x;
    std::span<const double> structure_target;
    std::function<double(const std::vector<std::size_t>&)> leaf_value;
    int max_depth; // -1 = unlimited
    int min_leaf;
    int features_per_split; // 0 = all
    Rng* rng;               // used only when features_per_split > 0

    Tree tree;

    int build(std::vector<std::size_t> rows, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});

        const bool depth_capped = max_depth >= 0 && depth >= max_depth;
        SplitChoice best;
        if (!depth_capped && rows.size() >= static_cast<std::size_t>(2 * min_leaf) &&
            subset_sse(structure_target, rows) > 0.0) {
            best = pick_split(rows);
        }

        if (!best.valid) {
            tree.nodes[static_cast<std::size_t>(node_index)].value = leaf_value(rows);
            return node_index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::size_t r : rows) {
            if (x(r, static_cast<std::size_t>(best.feature)) <= best.threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        rows.clear();
        rows.shrink_to_fit();

        const int left = build(std::move(left_rows), depth + 1);
        const int right = build(std::move(right_rows), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    SplitChoice pick_split(const std::vector<std::size_t>& rows) {
        const int d = static_cast<int>(x.cols());
        SplitChoice best;
        if (features_per_split > 0 && features_per_split < d) {
            std::vector<int> features(static_cast<std::size_t>(d));
            std::iota(features.begin(), features.end(), 0);
            for (int i = 0; i < features_per_split; ++i) {
                const std::size_t j =
                    static_cast<std::size_t>(i) +
                    static_cast<std::size_t>(rng->below(
                        static_cast<std::uint64_t>(d - i)));
                std::swap(features[static_cast<std::size_t>(i)], features[j]);
            }
            for (int i = 0; i < features_per_split; ++i) {
                consider(best, rows, features[static_cast<std::size_t>(i)]);
            }
            if (!best.valid) {
                // subsampled features were all constant in this node; fall back
                for (int f = 0; f < d; ++f) consider(best, rows, f);
            }
        } else {
            for (int f = 0; f < d; ++f) consider(best, rows, f);
        }
        return best;
    }

    void consider(SplitChoice& best, const std::vector<std::size_t>& rows, int feature) {
        const SplitChoice cand =
            best_split_on_feature(x, structure_target, rows, feature, min_leaf);
        if (cand.valid && (!best.valid || cand.child_sse < best.child_sse)) {
            best = cand;
        }
    }
};

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

} // namespace

double GbtModel::predict_row(std::span<const double> x) const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict_row(x);
    return s;
}

GbtModel fit_gbt(const Matrix& x, std::span<const double> y, const GbtParams& params) {
    const std::size_t n = x.rows();
    if (n == 0) raise(errc::bad_argument, "fit_gbt: empty data");

    GbtModel model;
    model.params = params;
    std::vector<double> f(n, 0.0);
    std::vector<double> residual(n);

    for (int round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];

        TreeBuilder builder{
            x,
            residual,
            [&](const std::vector<std::size_t>& rows) {
                double sum = 0.0;
                for (std::size_t r : rows) sum += residual[r];
                return params.learning_rate * sum /
                       (static_cast<double>(rows.size()) + params.lambda);
            },
            params.max_depth,
            1,
            0,
            nullptr,
            {}};
        builder.build(all_rows(n), 0);

        for (std::size_t i = 0; i < n; ++i) f[i] += builder.tree.predict_row(x.row(i));
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

double RfModel::predict_row(std::span<const double> x) const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict_row(x);
    return trees.empty() ? 0.0 : s / static_cast<double>(trees.size());
}

RfModel fit_rf(const Matrix& x, std::span<const double> y, const RfParams& params,
               std::uint64_t seed) {
    const std::size_t n = x.rows();
    if (n == 0) raise(errc::bad_argument, "fit_rf: empty data");

    const int d = static_cast<int>(x.cols());
    const int mtry = params.features_per_split > 0
                         ? params.features_per_split
                         : static_cast<int>((d + 2) / 3); // ceil(d/3)

    RfModel model;
    model.params = params;
    Rng base(seed);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng tree_rng = base.fork(static_cast<std::uint64_t>(t));
        std::vector<std::size_t> rows;
        if (params.bootstrap) {
            rows.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                rows.push_back(static_cast<std::size_t>(tree_rng.below(n)));
            }
            std::sort(rows.begin(), rows.end());
        } else {
            rows = all_rows(n);
        }

        TreeBuilder builder{x,
                            y,
                            [&](const std::vector<std::size_t>& leaf_rows) {
                                double sum = 0.0;
                                for (std::size_t r : leaf_rows) sum += y[r];
                                return sum / static_cast<double>(leaf_rows.size());
                            },
                            params.max_depth,
                            params.min_leaf,
                            mtry < d ? mtry : 0,
                            &tree_rng,
                            {}};
        builder.build(std::move(rows), 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

double QuantileGbtModel::predict_row(std::span<const double> x) const {
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict_row(x);
    return s;
}

QuantileGbtModel fit_quantile_gbt(const Matrix& x, std::span<const double> y,
                                  double tau, const GbtParams& params) {
    const std::size_t n = x.rows();
    if (n == 0) raise(errc::bad_argument, "fit_quantile_gbt: empty data");
    if (!(tau > 0.0 && tau < 1.0)) raise(errc::bad_argument, "tau outside (0,1)");

    QuantileGbtModel model;
    model.params = params;
    model.tau = tau;

    std::vector<double> f(n, 0.0);
    std::vector<double> gradient(n);
    std::vector<double> residual(n);

    for (int round = 0; round < params.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] = y[i] - f[i];
            gradient[i] = residual[i] > 0.0 ? tau : tau - 1.0;
        }

        TreeBuilder builder{
            x,
            gradient,
            [&](const std::vector<std::size_t>& rows) {
                std::vector<double> r;
                r.reserve(rows.size());
                for (std::size_t row : rows) r.push_back(residual[row]);
                return params.learning_rate * quantile(std::move(r), tau);
            },
            params.max_depth,
            1,
            0,
            nullptr,
            {}};
        builder.build(all_rows(n), 0);

        for (std::size_t i = 0; i < n; ++i) f[i] += builder.tree.predict_row(x.row(i));
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

double pinball_loss(std::span<const double> y, std::span<const double> yhat,
                    double tau) {
    if (y.size() != yhat.size() || y.empty()) {
        raise(errc::bad_argument, "pinball_loss: size mismatch or empty");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        s += e >= 0.0 ? tau * e : (tau - 1.0) * e;
    }
    return s / static_cast<double>(y.size());
}

} // namespace coastcast
