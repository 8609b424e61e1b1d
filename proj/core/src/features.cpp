#include "coastcast/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "coastcast/error.hpp"
#include "coastcast/rng.hpp"

namespace coastcast {

namespace {

double column_mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

CorrelationResult correlation_matrix(const Table& table) {
    const std::size_t d = table.n_cols();
    const std::size_t n = table.n_rows();
    if (n < 2) raise(errc::bad_argument, "correlation needs at least 2 rows");

    CorrelationResult out;
    out.columns = table.columns;
    out.matrix = Matrix(d, d);

    std::vector<double> means(d), norms(d);
    std::vector<std::vector<double>> centered(d);
    for (std::size_t c = 0; c < d; ++c) {
        means[c] = column_mean(table.data[c]);
        centered[c].resize(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            centered[c][i] = table.data[c][i] - means[c];
            ss += centered[c][i] * centered[c][i];
        }
        norms[c] = std::sqrt(ss);
        if (norms[c] == 0.0) out.zero_variance_columns.push_back(c);
    }

    for (std::size_t a = 0; a < d; ++a) {
        out.matrix(a, a) = 1.0;
        for (std::size_t b = a + 1; b < d; ++b) {
            double r = 0.0;
            if (norms[a] > 0.0 && norms[b] > 0.0) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
                r = dot / (norms[a] * norms[b]);
            }
            out.matrix(a, b) = r;
            out.matrix(b, a) = r;
        }
    }
    return out;
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (bins == 0 || values.empty()) {
        raise(errc::bad_argument, "histogram needs values and at least one bin");
    }
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) { // degenerate range: one centered unit-wide bin span
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    edges.back() = hi;
    return histogram(values, std::move(edges));
}

Histogram histogram(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
        raise(errc::bad_argument, "histogram edges must be sorted, size >= 2");
    }
    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (double v : values) {
        if (v < h.edges.front() || v > h.edges.back()) continue;
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        std::size_t bin = static_cast<std::size_t>(it - h.edges.begin());
        bin = bin == 0 ? 0 : bin - 1;
        if (bin >= h.counts.size()) bin = h.counts.size() - 1; // last bin closed
        ++h.counts[bin];
    }
    return h;
}

std::vector<double> area_differences(const Panel& panel) {
    std::map<long, std::map<int, double>> by_cell;
    for (const CellYearRecord& r : panel.rows) by_cell[r.cell_id][r.year] = r.area;
    std::vector<double> diffs;
    for (const auto& [cell, series] : by_cell) {
        for (auto it = series.begin(); it != series.end(); ++it) {
            auto next = std::next(it);
            if (next == series.end()) break;
            if (next->first == it->first + 1) diffs.push_back(next->second - it->second);
        }
    }
    return diffs;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) raise(errc::bad_argument, "quantile of empty data");
    if (q < 0.0 || q > 1.0) raise(errc::bad_argument, "q outside [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::size_t> iqr_outliers(std::span<const double> values, double factor) {
    if (values.size() < 4) raise(errc::bad_argument, "iqr_outliers needs >= 4 values");
    std::vector<double> copy(values.begin(), values.end());
    const double q1 = quantile(copy, 0.25);
    const double q3 = quantile(copy, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - factor * iqr;
    const double hi = q3 + factor * iqr;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < lo || values[i] > hi) out.push_back(i);
    }
    return out;
}

void scale_columns(Table& table, const std::vector<std::string>& names, double factor) {
    for (const auto& name : names) {
        for (double& v : table.col(name)) v *= factor;
    }
}

ScalerParams standardize_fit(const Table& train, const std::vector<std::string>& names) {
    ScalerParams p;
    p.columns = names;
    for (const auto& name : names) {
        const auto& col = train.col(name);
        if (col.empty()) raise(errc::bad_argument, "empty column " + name);
        const double mean = column_mean(col);
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(col.size()));
        if (sd == 0.0) {
            raise(errc::zero_variance_column, name + " has zero variance");
        }
        p.mean.push_back(mean);
        p.stddev.push_back(sd);
    }
    return p;
}

void standardize_apply(const ScalerParams& params, Table& table) {
    for (std::size_t i = 0; i < params.columns.size(); ++i) {
        auto& col = table.col(params.columns[i]);
        for (double& v : col) v = (v - params.mean[i]) / params.stddev[i];
    }
}

std::vector<std::string> remove_zero_variance(Table& table,
                                              const std::vector<std::string>& candidates) {
    std::vector<std::string> removed;
    for (const auto& name : candidates) {
        const auto& col = table.col(name);
        if (col.empty()) continue;
        const bool constant =
            std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; });
        if (constant) removed.push_back(name);
    }
    for (const auto& name : removed) table.drop_column(name);
    return removed;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_test(std::size_t n_rows, double ratio, std::uint64_t seed) {
    if (ratio < 0.0 || ratio > 1.0) raise(errc::bad_argument, "ratio outside [0,1]");
    Rng rng(seed);
    std::vector<std::size_t> perm = rng.permutation(n_rows);
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_rows)));
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return {std::move(train), std::move(test)};
}

namespace {

Matrix select_columns(const Matrix& x, const std::vector<std::size_t>& cols) {
    Matrix out(x.rows(), cols.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = x(i, cols[j]);
    }
    return out;
}

} // namespace

RfeResult rfe(const Matrix& x, std::span<const double> y, std::size_t n_select) {
    const std::size_t d = x.cols();
    if (n_select == 0 || n_select > d) {
        raise(errc::bad_argument, "n_select outside [1, n_features]");
    }

    std::vector<std::size_t> remaining(d);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    RfeResult result;

    while (remaining.size() > n_select) {
        Matrix sub = select_columns(x, remaining);
        // intercept column + tiny ridge keeps exact duplicate columns solvable
        Matrix design(sub.rows(), sub.cols() + 1);
        for (std::size_t i = 0; i < sub.rows(); ++i) {
            design(i, 0) = 1.0;
            for (std::size_t j = 0; j < sub.cols(); ++j) design(i, j + 1) = sub(i, j);
        }
        const std::vector<double> coef = solve_ridge(design, y, 1e-10);
        std::size_t weakest = 0;
        double weakest_mag = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < remaining.size(); ++j) {
            const double mag = std::fabs(coef[j + 1]);
            if (mag < weakest_mag) {
                weakest_mag = mag;
                weakest = j;
            }
        }
        result.elimination_order.push_back(remaining[weakest]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(weakest));
    }
    result.selected = remaining;
    return result;
}

PcaModel pca_fit(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) raise(errc::bad_argument, "pca needs at least 2 rows");

    PcaModel model;
    model.means.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) model.means[j] += x(i, j);
    }
    for (double& m : model.means) m /= static_cast<double>(n);

    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double va = x(i, a) - model.means[a];
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) += va * (x(i, b) - model.means[b]);
            }
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= static_cast<double>(n);
            cov(b, a) = cov(a, b);
        }
    }

    SymEigen eig = jacobi_eigen_sym(cov, 1e-12, 100);
    model.components = eig.vectors;
    model.eigenvalues = eig.values;
    double total = 0.0;
    for (double& v : model.eigenvalues) {
        if (v < 0.0) v = 0.0; // numerical noise on rank-deficient inputs
        total += v;
    }
    model.explained_ratio.resize(d, 0.0);
    if (total > 0.0) {
        for (std::size_t j = 0; j < d; ++j) model.explained_ratio[j] = model.eigenvalues[j] / total;
    }
    return model;
}

std::size_t pca_select(const PcaModel& model, double variance_threshold) {
    double cum = 0.0;
    for (std::size_t k = 0; k < model.explained_ratio.size(); ++k) {
        cum += model.explained_ratio[k];
        if (cum >= variance_threshold) return k + 1;
    }
    return model.explained_ratio.size();
}

Matrix pca_transform(const PcaModel& model, const Matrix& x, std::size_t k) {
    const std::size_t d = model.means.size();
    if (x.cols() != d) raise(errc::bad_argument, "pca_transform: width mismatch");
    if (k > d) raise(errc::bad_argument, "pca_transform: k > n_features");
    Matrix out(x.rows(), k);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t f = 0; f < d; ++f) {
                s += (x(i, f) - model.means[f]) * model.components(f, j);
            }
            out(i, j) = s;
        }
    }
    return out;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace

KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed,
                    std::vector<double>* inertia_trace) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (k == 0 || n < k) raise(errc::bad_argument, "kmeans needs 1 <= k <= rows");

    Rng rng(seed);
    Matrix centers(k, d);

    // k-means++ seeding
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(rng.below(n));
        for (std::size_t j = 0; j < d; ++j) centers(0, j) = x(first, j);
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dist2[i] = std::min(dist2[i], squared_distance(x.row(i), centers.row(c - 1)));
                total += dist2[i];
            }
            std::size_t pick = 0;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double cum = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cum += dist2[i];
                    if (cum >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<std::size_t>(rng.below(n));
            }
            for (std::size_t j = 0; j < d; ++j) centers(c, j) = x(pick, j);
        }
    }

    KmeansResult result;
    result.labels.assign(n, 0);
    std::vector<std::size_t> counts(k, 0);
    Matrix sums(k, d);

    for (int iter = 0; iter < 300; ++iter) {
        // assignment
        double iter_inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d2 = squared_distance(x.row(i), centers.row(c));
                if (d2 < best) {
                    best = d2;
                    best_c = static_cast<int>(c);
                }
            }
            result.labels[i] = best_c;
            iter_inertia += best;
        }
        if (inertia_trace) inertia_trace->push_back(iter_inertia);

        // update
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        std::fill(sums.storage().begin(), sums.storage().end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(result.labels[i]);
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j) sums(c, j) += x(i, j);
        }

        // reseed empty clusters at the point farthest from its center
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            ++result.empty_cluster_restarts;
            double worst = -1.0;
            std::size_t worst_i = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t ci = static_cast<std::size_t>(result.labels[i]);
                const double d2 = squared_distance(x.row(i), centers.row(ci));
                if (d2 > worst) {
                    worst = d2;
                    worst_i = i;
                }
            }
            counts[c] = 1;
            const std::size_t prev = static_cast<std::size_t>(result.labels[worst_i]);
            --counts[prev];
            for (std::size_t j = 0; j < d; ++j) {
                sums(prev, j) -= x(worst_i, j);
                sums(c, j) = x(worst_i, j);
            }
            result.labels[worst_i] = static_cast<int>(c);
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            double shift2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double next = counts[c] ? sums(c, j) / static_cast<double>(counts[c])
                                              : centers(c, j);
                const double delta = next - centers(c, j);
                shift2 += delta * delta;
                centers(c, j) = next;
            }
            movement = std::max(movement, std::sqrt(shift2));
        }
        if (movement < 1e-8) break;
    }

    result.centers = centers;
    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double d2 = squared_distance(x.row(i), centers.row(c));
            if (d2 < best) {
                best = d2;
                best_c = static_cast<int>(c);
            }
        }
        result.labels[i] = best_c;
        result.inertia += best;
    }
    return result;
}

std::size_t elbow(std::span<const double> inertias, std::size_t k_start) {
    if (inertias.size() < 3) return k_start + (inertias.empty() ? 0 : inertias.size() - 1);
    const double x0 = static_cast<double>(k_start);
    const double y0 = inertias.front();
    const double x1 = static_cast<double>(k_start + inertias.size() - 1);
    const double y1 = inertias.back();
    const double len = std::hypot(x1 - x0, y1 - y0);
    double best = -1.0;
    std::size_t best_k = k_start;
    for (std::size_t i = 0; i < inertias.size(); ++i) {
        const double px = static_cast<double>(k_start + i);
        const double py = inertias[i];
        const double dist =
            std::fabs((x1 - x0) * (y0 - py) - (x0 - px) * (y1 - y0)) / len;
        if (dist > best) {
            best = dist;
            best_k = k_start + i;
        }
    }
    return best_k;
}

} // namespace coastcast
