#pragma once

#include "coastcast/models.hpp"

namespace coastcast {

// Epsilon-insensitive support vector regression solved in the dual by SMO:
// beta_i = alpha_i - alpha_i* lies in [-C, C] with sum(beta) = 0, and each
// update jointly moves the maximal violating pair. Training stops when the
// KKT violation (max b_low - min b_high over the feasible-bias bounds)
// drops to `tol`, and raises no_convergence after max_pass_factor * n
// pair-update sweeps.
class SvrModel final : public Model {
public:
    SvrHyperParams params;
    Matrix support_x;
    std::vector<double> beta; // nonzero dual coefficients, one per support row
    double bias = 0.0;
    double kkt_violation = 0.0;
    int passes = 0;

    std::string kind() const override { return "svr"; }
    double predict_row(std::span<const double> x) const override;
};

double svr_kernel(const SvrHyperParams& params, std::span<const double> a,
                  std::span<const double> b);

SvrModel fit_svr(const Matrix& x, std::span<const double> y,
                 const SvrHyperParams& params, double tol = 1e-3,
                 int max_pass_factor = 10);

// Recomputes the dual KKT violation of a trained model against the full
// training set (independent of the solver's bookkeeping).
double svr_kkt_violation(const SvrModel& model, const Matrix& x,
                         std::span<const double> y);

struct SvrGrid {
    std::vector<double> c = {0.1, 10, 100};
    std::vector<double> gamma = {1, 0.01};
    std::vector<double> epsilon = {0.01, 0.0001};
    std::vector<SvrKernel> kernels = {SvrKernel::linear, SvrKernel::rbf,
                                      SvrKernel::poly};
};

struct SvrGridCell {
    SvrHyperParams params;
    std::vector<double> fold_r2;
    double mean_r2 = 0.0;
    bool converged = true;
};

struct SvrGridResult {
    SvrHyperParams best;
    double best_mean_r2 = 0.0;
    std::vector<SvrGridCell> cells;
};

// Exhaustive search over C x gamma x epsilon x kernel with shared k-fold
// assignments; best cell has the highest mean validation R^2, first wins
// on ties. Cells whose solver fails to converge score -inf.
SvrGridResult grid_search_svr(const Matrix& x, std::span<const double> y,
                              const SvrGrid& grid, std::size_t cv_folds,
                              std::uint64_t seed);

} // namespace coastcast
