#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

struct TreeNode {
    int feature = -1; // -1 = leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict_row(std::span<const double> x) const {
        int i = 0;
        while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
            const TreeNode& n = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }
};

// Gradient boosting on squared loss. The ensemble starts from zero;
// each round fits a depth-limited tree to the residuals with leaf value
// sum(residual)/(count + lambda), shrunk by the learning rate.
class GbtModel final : public Model {
public:
    GbtParams params;
    std::vector<Tree> trees; // leaf values already scaled by learning rate

    std::string kind() const override { return "gbt"; }
    double predict_row(std::span<const double> x) const override;
};

GbtModel fit_gbt(const Matrix& x, std::span<const double> y, const GbtParams& params);

// Bagged CART forest, variance-reduction splits, ceil(d/3) features per
// split by default; prediction is the mean over trees.
class RfModel final : public Model {
public:
    RfParams params;
    std::vector<Tree> trees;

    std::string kind() const override { return "rf"; }
    double predict_row(std::span<const double> x) const override;
};

RfModel fit_rf(const Matrix& x, std::span<const double> y, const RfParams& params,
               std::uint64_t seed);

// Gradient boosting on pinball loss: tree structure follows the negative
// gradient, leaf values are the tau-quantile of the residuals in the leaf.
class QuantileGbtModel final : public Model {
public:
    GbtParams params;
    double tau = 0.5;
    std::vector<Tree> trees;

    std::string kind() const override { return "quantile_gbt"; }
    double predict_row(std::span<const double> x) const override;
};

QuantileGbtModel fit_quantile_gbt(const Matrix& x, std::span<const double> y,
                                  double tau, const GbtParams& params);

double pinball_loss(std::span<const double> y, std::span<const double> yhat,
                    double tau);

} // namespace coastcast
