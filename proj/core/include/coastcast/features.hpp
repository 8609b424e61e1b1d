#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coastcast/linalg.hpp"
#include "coastcast/panel.hpp"
#include "coastcast/table.hpp"

namespace coastcast {

struct CorrelationResult {
    std::vector<std::string> columns;
    Matrix matrix; // Pearson, symmetric, unit diagonal
    // zero-variance columns are reported and their correlations set to 0
    std::vector<std::size_t> zero_variance_columns;
};

CorrelationResult correlation_matrix(const Table& table);

struct Histogram {
    std::vector<double> edges;       // size = counts.size() + 1
    std::vector<std::size_t> counts; // [e_i, e_{i+1}), last bin closed
};

Histogram histogram(std::span<const double> values, std::size_t bins);
Histogram histogram(std::span<const double> values, std::vector<double> edges);

// area(y) - area(y-1) across all cells and consecutive years.
std::vector<double> area_differences(const Panel& panel);

// Linear-interpolation quantile at position (n-1)*q over the sorted values.
double quantile(std::vector<double> values, double q);

// Indices with x < Q1 - factor*IQR or x > Q3 + factor*IQR.
std::vector<std::size_t> iqr_outliers(std::span<const double> values,
                                      double factor = 3.0);

void scale_columns(Table& table, const std::vector<std::string>& names,
                   double factor);

struct ScalerParams {
    std::vector<std::string> columns;
    std::vector<double> mean;
    std::vector<double> stddev; // population (1/n) convention
};

// Fit on the training split only. Throws zero_variance_column.
ScalerParams standardize_fit(const Table& train, const std::vector<std::string>& names);
void standardize_apply(const ScalerParams& params, Table& table);

std::vector<std::string> remove_zero_variance(Table& table,
                                              const std::vector<std::string>& candidates);

// Deterministic shuffle split; train gets round(ratio * n) rows.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_test(std::size_t n_rows, double ratio, std::uint64_t seed);

struct RfeResult {
    std::vector<std::size_t> selected;          // ascending feature indices
    std::vector<std::size_t> elimination_order; // first removed first
};

// Recursive feature elimination with a linear base model: refit, drop the
// feature with the smallest |coefficient| (ties: lowest index) until
// n_select remain. X must be standardized.
RfeResult rfe(const Matrix& x, std::span<const double> y, std::size_t n_select);

struct PcaModel {
    std::vector<double> means;
    Matrix components; // column j = j-th principal axis
    std::vector<double> eigenvalues;      // descending
    std::vector<double> explained_ratio;  // sums to 1
};

PcaModel pca_fit(const Matrix& x);

// Smallest k whose cumulative explained ratio reaches the threshold.
std::size_t pca_select(const PcaModel& model, double variance_threshold);

Matrix pca_transform(const PcaModel& model, const Matrix& x, std::size_t k);

struct KmeansResult {
    std::vector<int> labels;
    Matrix centers;
    double inertia = 0.0;
    int empty_cluster_restarts = 0; // reported when reseeding was needed
};

// k-means++ seeding then Lloyd iterations until center movement < 1e-8 or
// 300 iterations. inertia_trace, when given, records the post-assignment
// inertia of every Lloyd iteration.
KmeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed,
                    std::vector<double>* inertia_trace = nullptr);

// Inertia curve elbow: the k whose point lies farthest from the chord
// between the curve endpoints. inertias[i] belongs to k = k_start + i.
std::size_t elbow(std::span<const double> inertias, std::size_t k_start = 1);

} // namespace coastcast
