#include "coastcast/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coastcast/cv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

double svr_kernel(const SvrHyperParams& params, std::span<const double> a,
                  std::span<const double> b) {
    switch (params.kernel) {
    case SvrKernel::linear: {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
    }
    case SvrKernel::rbf: {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            d2 += d * d;
        }
        return std::exp(-params.gamma * d2);
    }
    case SvrKernel::poly: {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        const double base = params.gamma * dot + 1.0;
        return base * base * base;
    }
    }
    return 0.0;
}

namespace {

// Feasible-bias bounds at the current iterate. Optimality means some bias b
// satisfies every bound: max(b_low) <= b + tol slack.
//   moving beta_i up   is optimal iff g_i + b + eps*slope_up(beta_i)   >= 0
//   moving beta_i down is optimal iff g_i + b + eps*slope_down(beta_i) <= 0
double b_low_at(double beta, double g, double eps) {
    return -(g + (beta >= 0.0 ? eps : -eps));
}
double b_high_at(double beta, double g, double eps) {
    return -(g + (beta > 0.0 ? eps : -eps));
}

struct Selection {
    std::size_t up = 0, down = 0;
    double b_low = -std::numeric_limits<double>::infinity();
    double b_high = std::numeric_limits<double>::infinity();
    double violation() const { return b_low - b_high; }
};

Selection select_pair(const std::vector<double>& beta, const std::vector<double>& g,
                      double c, double eps) {
    Selection s;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] < c) {
            const double bl = b_low_at(beta[i], g[i], eps);
            if (bl > s.b_low) {
                s.b_low = bl;
                s.up = i;
            }
        }
        if (beta[i] > -c) {
            const double bh = b_high_at(beta[i], g[i], eps);
            if (bh < s.b_high) {
                s.b_high = bh;
                s.down = i;
            }
        }
    }
    return s;
}

} // namespace

double SvrModel::predict_row(std::span<const double> x) const {
    double s = bias;
    for (std::size_t i = 0; i < support_x.rows(); ++i) {
        s += beta[i] * svr_kernel(params, support_x.row(i), x);
    }
    return s;
}

SvrModel fit_svr(const Matrix& x, std::span<const double> y,
                 const SvrHyperParams& params, double tol, int max_pass_factor) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) raise(errc::bad_argument, "fit_svr: bad inputs");
    if (!(params.c > 0.0) || !(params.gamma > 0.0) || !(params.epsilon >= 0.0)) {
        raise(errc::bad_argument, "fit_svr: hyperparameters out of range");
    }

    // Precompute the kernel when it fits comfortably; otherwise recompute
    // rows on demand.
    const bool cache = n <= 4096;
    Matrix kmat;
    if (cache) {
        kmat = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double v = svr_kernel(params, x.row(i), x.row(j));
                kmat(i, j) = v;
                kmat(j, i) = v;
            }
        }
    }
    std::vector<double> krow_i, krow_j;
    auto kernel_row = [&](std::size_t i, std::vector<double>& buf) -> const double* {
        if (cache) return &kmat.storage()[i * n];
        buf.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            buf[j] = svr_kernel(params, x.row(i), x.row(j));
        }
        return buf.data();
    };

    std::vector<double> beta(n, 0.0);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -y[i];

    const double c = params.c;
    const double eps = params.epsilon;
    const long max_passes = std::max<long>(
        1, static_cast<long>(max_pass_factor) * static_cast<long>(n));

    std::vector<double> kdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        kdiag[i] = svr_kernel(params, x.row(i), x.row(i));
    }

    Selection sel = select_pair(beta, g, c, eps);
    long pass = 0;
    for (; pass < max_passes && sel.violation() > tol; ++pass) {
        for (std::size_t step = 0; step < n; ++step) {
            if (sel.violation() <= tol) break;
            const std::size_t i = sel.up;

            // second-order partner choice: maximize the guaranteed decrease
            // (b_low - b_high_j)^2 / a_ij among eligible j
            const double* ki = kernel_row(i, krow_i);
            std::size_t j = sel.down;
            {
                double best_gain = -1.0;
                for (std::size_t cand = 0; cand < n; ++cand) {
                    if (cand == i || !(beta[cand] > -c)) continue;
                    const double bh = b_high_at(beta[cand], g[cand], eps);
                    const double diff = sel.b_low - bh;
                    if (diff <= tol) continue;
                    const double a =
                        std::max(kdiag[i] + kdiag[cand] - 2.0 * ki[cand], 1e-12);
                    const double gain = diff * diff / a;
                    if (gain > best_gain) {
                        best_gain = gain;
                        j = cand;
                    }
                }
            }

            const double* kj = kernel_row(j, krow_j);
            const double curvature = std::max(ki[i] + kj[j] - 2.0 * ki[j], 1e-12);

            // D(delta) = 1/2 a delta^2 + (g_i - g_j) delta
            //            + eps|beta_i + delta| + eps|beta_j - delta|,
            // delta in (0, min(C - beta_i, beta_j + C)]; piecewise quadratic
            // with kinks where either coefficient crosses zero.
            const double delta_max = std::min(c - beta[i], beta[j] + c);
            std::vector<double> knots = {0.0, delta_max};
            if (beta[i] < 0.0 && -beta[i] < delta_max) knots.push_back(-beta[i]);
            if (beta[j] > 0.0 && beta[j] < delta_max) knots.push_back(beta[j]);
            std::sort(knots.begin(), knots.end());

            auto objective = [&](double d) {
                return 0.5 * curvature * d * d + (g[i] - g[j]) * d +
                       eps * std::fabs(beta[i] + d) + eps * std::fabs(beta[j] - d);
            };
            double best_delta = 0.0;
            double best_value = objective(0.0);
            for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
                const double lo = knots[s];
                const double hi = knots[s + 1];
                if (hi <= lo) continue;
                const double mid = (lo + hi) / 2.0;
                const double si = beta[i] + mid >= 0.0 ? 1.0 : -1.0;
                const double sj = beta[j] - mid >= 0.0 ? 1.0 : -1.0;
                const double lin = (g[i] - g[j]) + eps * si - eps * sj;
                const double cand = std::clamp(-lin / curvature, lo, hi);
                for (double d : {cand, hi}) {
                    const double v = objective(d);
                    if (v < best_value) {
                        best_value = v;
                        best_delta = d;
                    }
                }
            }

            if (best_delta <= 0.0) break; // numerically stuck at this pair
            beta[i] += best_delta;
            beta[j] -= best_delta;
            for (std::size_t r = 0; r < n; ++r) {
                g[r] += best_delta * (ki[r] - kj[r]);
            }
            sel = select_pair(beta, g, c, eps);
        }
        sel = select_pair(beta, g, c, eps);
    }

    const double final_violation = std::max(0.0, sel.violation());
    if (final_violation > tol) {
        raise(errc::no_convergence,
              "svr solver stopped after " + std::to_string(pass) +
                  " passes with KKT violation " + std::to_string(final_violation));
    }

    SvrModel model;
    model.params = params;
    model.kkt_violation = final_violation;
    model.passes = static_cast<int>(pass) + 1;
    // any bias between the bounds satisfies KKT; pick the value nearest zero
    const double lo = std::min(sel.b_low, sel.b_high);
    const double hi = std::max(sel.b_low, sel.b_high);
    model.bias = std::clamp(0.0, lo, hi);

    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] != 0.0) support.push_back(i);
    }
    model.support_x = Matrix(support.size(), x.cols());
    model.beta.reserve(support.size());
    for (std::size_t s = 0; s < support.size(); ++s) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            model.support_x(s, j) = x(support[s], j);
        }
        model.beta.push_back(beta[support[s]]);
    }
    return model;
}

double svr_kkt_violation(const SvrModel& model, const Matrix& x,
                         std::span<const double> y) {
    const std::size_t n = x.rows();
    // reconstruct full beta by matching support rows to training rows
    std::vector<double> beta(n, 0.0);
    std::vector<bool> used(model.beta.size(), false);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < model.support_x.rows(); ++s) {
            if (used[s]) continue;
            bool same = true;
            for (std::size_t j = 0; j < x.cols(); ++j) {
                if (model.support_x(s, j) != x(i, j)) {
                    same = false;
                    break;
                }
            }
            if (same) {
                beta[i] = model.beta[s];
                used[s] = true;
                break;
            }
        }
    }
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = model.predict_row(x.row(i)) - model.bias - y[i];
    }
    const Selection sel = select_pair(beta, g, model.params.c, model.params.epsilon);
    return std::max(0.0, sel.violation());
}

SvrGridResult grid_search_svr(const Matrix& x, std::span<const double> y,
                              const SvrGrid& grid, std::size_t cv_folds,
                              std::uint64_t seed) {
    const std::size_t n = x.rows();
    if (cv_folds < 2 || n < cv_folds) {
        raise(errc::bad_argument, "grid_search_svr: need 2 <= folds <= rows");
    }

    const auto folds = kfold_assignment(n, cv_folds, seed, 0);

    SvrGridResult result;
    result.best_mean_r2 = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    for (double c : grid.c) {
        for (double gamma : grid.gamma) {
            for (double epsilon : grid.epsilon) {
                for (SvrKernel kernel : grid.kernels) {
                    SvrGridCell cell;
                    cell.params = SvrHyperParams{c, gamma, epsilon, kernel};
                    double sum = 0.0;
                    for (const auto& val_rows : folds) {
                        std::vector<std::uint8_t> in_val(n, 0);
                        for (std::size_t r : val_rows) in_val[r] = 1;
                        std::vector<std::size_t> train_rows;
                        train_rows.reserve(n - val_rows.size());
                        for (std::size_t r = 0; r < n; ++r) {
                            if (!in_val[r]) train_rows.push_back(r);
                        }
                        Matrix xt(train_rows.size(), x.cols());
                        std::vector<double> yt(train_rows.size());
                        for (std::size_t i = 0; i < train_rows.size(); ++i) {
                            for (std::size_t j = 0; j < x.cols(); ++j) {
                                xt(i, j) = x(train_rows[i], j);
                            }
                            yt[i] = y[train_rows[i]];
                        }
                        Matrix xv(val_rows.size(), x.cols());
                        std::vector<double> yv(val_rows.size());
                        for (std::size_t i = 0; i < val_rows.size(); ++i) {
                            for (std::size_t j = 0; j < x.cols(); ++j) {
                                xv(i, j) = x(val_rows[i], j);
                            }
                            yv[i] = y[val_rows[i]];
                        }
                        try {
                            const SvrModel m = fit_svr(xt, yt, cell.params);
                            const std::vector<double> pred = predict(m, xv);
                            cell.fold_r2.push_back(metrics(yv, pred).r2);
                        } catch (const Error& e) {
                            if (e.code() != errc::no_convergence) throw;
                            cell.converged = false;
                            cell.fold_r2.push_back(
                                -std::numeric_limits<double>::infinity());
                        }
                        sum += cell.fold_r2.back();
                    }
                    cell.mean_r2 = sum / static_cast<double>(cv_folds);
                    if (cell.mean_r2 > result.best_mean_r2) {
                        result.best_mean_r2 = cell.mean_r2;
                        result.best = cell.params;
                        have_best = true;
                    }
                    result.cells.push_back(std::move(cell));
                }
            }
        }
    }
    if (!have_best) {
        raise(errc::no_convergence, "no grid cell produced a finite CV score");
    }
    return result;
}

} // namespace coastcast
