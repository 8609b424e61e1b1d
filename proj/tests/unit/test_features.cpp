#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coastcast/error.hpp"
#include "coastcast/features.hpp"
#include "coastcast/rng.hpp"

#include "../helpers.hpp"

using namespace coastcast;

namespace {

Table make_table(std::vector<std::string> names,
                 std::vector<std::vector<double>> cols) {
    Table t;
    t.columns = std::move(names);
    t.data = std::move(cols);
    return t;
}

// two-pass definitional Pearson correlation; the oracle
double pearson_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

Panel constant_panel(double area, int years) {
    std::vector<std::vector<CellYearRecord>> yearly;
    for (int y = 0; y < years; ++y) {
        CellYearRecord r;
        r.cell_id = 1;
        r.year = 2000 + y;
        r.right = r.top = 1.0;
        r.area = area;
        yearly.push_back({r});
    }
    return align_cells(yearly);
}

} // namespace

TEST_CASE("correlation of a column with itself is 1, with its negation -1") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> neg = {-1, -2, -3, -4, -5};
    const auto res = correlation_matrix(make_table({"x", "neg"}, {x, neg}));
    CHECK(res.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(res.matrix(1, 1) == doctest::Approx(1.0));
    CHECK(res.matrix(0, 1) == doctest::Approx(-1.0));
    CHECK(res.matrix(1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("correlation matches the two-pass oracle on random columns") {
    Rng rng(42);
    const std::size_t n = 50;
    std::vector<std::vector<double>> cols(4, std::vector<double>(n));
    for (auto& c : cols) {
        for (auto& v : c) v = rng.normal(0, 2);
    }
    const auto res =
        correlation_matrix(make_table({"a", "b", "c", "d"}, cols));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double expect =
                i == j ? 1.0 : pearson_oracle(cols[i], cols[j]);
            CHECK(std::fabs(res.matrix(i, j) - expect) < 1e-12);
            CHECK(res.matrix(i, j) == res.matrix(j, i));
        }
    }
}

TEST_CASE("zero-variance columns are reported with correlation zero") {
    const auto res = correlation_matrix(
        make_table({"x", "const"}, {{1, 2, 3}, {7, 7, 7}}));
    REQUIRE(res.zero_variance_columns == std::vector<std::size_t>{1});
    CHECK(res.matrix(0, 1) == 0.0);
    CHECK(res.matrix(1, 1) == 1.0);
}

TEST_CASE("constant panel puts all histogram mass in the zero bin") {
    const auto diffs = area_differences(constant_panel(2.5, 5));
    REQUIRE(diffs.size() == 4);
    const Histogram h = histogram(diffs, 5);
    std::size_t total = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        total += h.counts[i];
        if (h.counts[i] > 0) {
            CHECK(h.edges[i] <= 0.0);
            CHECK(h.edges[i + 1] >= 0.0);
        }
    }
    CHECK(total == 4);
}

TEST_CASE("strictly declining panel has only negative differences") {
    std::vector<std::vector<CellYearRecord>> yearly;
    for (int y = 0; y < 6; ++y) {
        CellYearRecord r;
        r.cell_id = 3;
        r.year = 2000 + y;
        r.right = r.top = 1.0;
        r.area = 10.0 * std::pow(0.98, y);
        yearly.push_back({r});
    }
    const auto diffs = area_differences(align_cells(yearly));
    REQUIRE(diffs.size() == 5);
    for (double d : diffs) CHECK(d < 0.0);
}

TEST_CASE("known differences land in hand-counted unit bins") {
    const std::vector<double> diffs = {-2, -1, -1, 0};
    const Histogram h = histogram(diffs, std::vector<double>{-2, -1, 0, 1});
    REQUIRE(h.counts.size() == 3);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[1] == 2);
    CHECK(h.counts[2] == 1);
}

TEST_CASE("quantile uses linear interpolation at (n-1)q") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(quantile(v, 0.25) == doctest::Approx(25.75));
    CHECK(quantile(v, 0.75) == doctest::Approx(75.25));
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 100.0);
    CHECK(quantile({1, 2}, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("iqr flags the planted outlier and nothing else") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    v.push_back(1000.0);
    const auto flagged = iqr_outliers(v, 3.0);
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0] == 100);
}

TEST_CASE("iqr on constant and symmetric small data flags nothing") {
    CHECK(iqr_outliers(std::vector<double>{5, 5, 5, 5, 5}, 3.0).empty());
    // fences by hand: Q1 = -1, Q3 = 1, IQR = 2 -> [-7, 7]
    CHECK(iqr_outliers(std::vector<double>{-5, -1, 0, 1, 5}, 3.0).empty());
}

TEST_CASE("iqr outlier flagging is order-invariant") {
    Rng rng(9);
    std::vector<double> v(200);
    for (auto& x : v) x = rng.normal();
    v[17] = 40.0;
    v[101] = -35.0;
    const auto base = iqr_outliers(v, 3.0);

    auto perm = rng.permutation(v.size());
    std::vector<double> shuffled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) shuffled[i] = v[perm[i]];
    const auto after = iqr_outliers(shuffled, 3.0);

    std::vector<double> base_values, after_values;
    for (auto i : base) base_values.push_back(v[i]);
    for (auto i : after) after_values.push_back(shuffled[i]);
    std::sort(base_values.begin(), base_values.end());
    std::sort(after_values.begin(), after_values.end());
    CHECK(base_values == after_values);
}

TEST_CASE("area scaling is plain multiplication by 1e5") {
    Table t = make_table({"area", "perimeter", "area_next"},
                         {{0.0, 1.0, 2.3e-4}, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5}});
    scale_columns(t, {"area", "perimeter", "area_next"}, 1e5);
    CHECK(t.col("area")[0] == 0.0);
    CHECK(t.col("area")[1] == doctest::Approx(100000.0));
    CHECK(t.col("area")[2] == doctest::Approx(23.0));
}

TEST_CASE("standardize: population convention on {1,3}") {
    Table t = make_table({"x"}, {{1.0, 3.0}});
    const ScalerParams p = standardize_fit(t, {"x"});
    CHECK(p.mean[0] == doctest::Approx(2.0));
    CHECK(p.stddev[0] == doctest::Approx(1.0));
    standardize_apply(p, t);
    CHECK(t.col("x")[0] == doctest::Approx(-1.0));
    CHECK(t.col("x")[1] == doctest::Approx(1.0));
}

TEST_CASE("standardized training columns have mean 0 and sd 1") {
    Rng rng(3);
    std::vector<double> a(500), b(500);
    for (std::size_t i = 0; i < 500; ++i) {
        a[i] = rng.normal(5, 3);
        b[i] = rng.uniform(-2, 9);
    }
    Table t = make_table({"a", "b"}, {a, b});
    const ScalerParams p = standardize_fit(t, {"a", "b"});
    standardize_apply(p, t);
    for (const auto* name : {"a", "b"}) {
        const auto& col = t.col(name);
        double mean = 0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(col.size());
        double ss = 0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(col.size()));
        CHECK(std::fabs(mean) < 1e-9);
        CHECK(std::fabs(sd - 1.0) < 1e-9);
    }
    // refit on the standardized data is the identity transform
    const ScalerParams p2 = standardize_fit(t, {"a", "b"});
    CHECK(p2.mean[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p2.stddev[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize_fit rejects zero variance") {
    Table t = make_table({"c"}, {{4, 4, 4}});
    CHECK(testutil::throws_errc([&] { standardize_fit(t, {"c"}); },
                                errc::zero_variance_column));
}

TEST_CASE("remove_zero_variance drops constant columns and reports them") {
    Table t = make_table({"x", "c"}, {{1, 2, 3}, {7, 7, 7}});
    const auto removed = remove_zero_variance(t, {"x", "c"});
    CHECK(removed == std::vector<std::string>{"c"});
    CHECK(!t.has_column("c"));
    CHECK(t.has_column("x"));
}

TEST_CASE("split is deterministic, disjoint, and 8/2 on ten rows") {
    const auto [train, test] = split_train_test(10, 0.8, 123);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    std::vector<std::size_t> all;
    all.insert(all.end(), train.begin(), train.end());
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);

    const auto [train2, test2] = split_train_test(10, 0.8, 123);
    CHECK(train == train2);
    CHECK(test == test2);

    // different seeds almost surely differ
    int distinct = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto [t1, t2] = split_train_test(50, 0.8, s);
        const auto [u1, u2] = split_train_test(50, 0.8, s + 1000);
        if (t1 != u1) ++distinct;
    }
    CHECK(distinct >= 19);
}

TEST_CASE("rfe keeps the informative feature across 20 seeds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const std::size_t n = 200;
        Matrix x(n, 2);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = rng.normal();
            x(i, 1) = rng.normal();
            y[i] = 3.0 * x(i, 0) + rng.normal(0, 0.01);
        }
        const RfeResult res = rfe(x, y, 1);
        REQUIRE(res.selected.size() == 1);
        CHECK(res.selected[0] == 0);
        CHECK(res.elimination_order == std::vector<std::size_t>{1});
    }
}

TEST_CASE("rfe with n_select = n_features is the identity") {
    Matrix x(10, 3);
    Rng rng(5);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
        y[i] = rng.normal();
    }
    const RfeResult res = rfe(x, y, 3);
    CHECK(res.selected == std::vector<std::size_t>{0, 1, 2});
    CHECK(res.elimination_order.empty());
}

TEST_CASE("rfe on an exact duplicate pair keeps exactly one") {
    Rng rng(17);
    const std::size_t n = 100;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = x(i, 0); // exact duplicate
        y[i] = 2.0 * x(i, 0) + rng.normal(0, 0.01);
    }
    const RfeResult res = rfe(x, y, 1);
    REQUIRE(res.selected.size() == 1);
    // which of the pair survives is implementation-defined but stable
    CHECK((res.selected[0] == 0 || res.selected[0] == 1));
    const RfeResult again = rfe(x, y, 1);
    CHECK(res.selected == again.selected);
}

TEST_CASE("rfe first removal matches the weakest first-fit coefficient") {
    Rng rng(23);
    const std::size_t n = 300;
    const std::size_t d = 5;
    Matrix x(n, d);
    std::vector<double> y(n);
    const double w[d] = {2.0, -0.5, 0.05, 1.0, -3.0};
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = rng.normal();
            s += w[j] * x(i, j);
        }
        y[i] = s + rng.normal(0, 0.01);
    }
    const RfeResult res = rfe(x, y, d - 1);
    REQUIRE(res.elimination_order.size() == 1);
    CHECK(res.elimination_order[0] == 2); // smallest |w|
}

TEST_CASE("pca on two perfectly correlated features") {
    Rng rng(31);
    const std::size_t n = 400;
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.normal();
        x(i, 0) = v;
        x(i, 1) = 2.0 * v;
    }
    const PcaModel m = pca_fit(x);
    CHECK(m.explained_ratio[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pca_select(m, 0.69) == 1);
}

TEST_CASE("pca ratios are about one third each on isotropic 3d data") {
    Rng rng(777);
    const std::size_t n = 50000;
    Matrix x(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    }
    const PcaModel m = pca_fit(x);
    for (double r : m.explained_ratio) CHECK(std::fabs(r - 1.0 / 3.0) < 0.05);
}

TEST_CASE("pca with exact covariance diag(4,1) via the whitening trick") {
    Rng rng(6);
    const std::size_t n = 2000;
    Matrix g(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        g(i, 0) = rng.normal();
        g(i, 1) = rng.normal();
    }
    // center, whiten empirically, then color with diag(2, 1)
    double mean[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        mean[0] += g(i, 0);
        mean[1] += g(i, 1);
    }
    mean[0] /= n;
    mean[1] /= n;
    Matrix cov(2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = g(i, 0) - mean[0];
        const double b = g(i, 1) - mean[1];
        cov(0, 0) += a * a;
        cov(0, 1) += a * b;
        cov(1, 0) += a * b;
        cov(1, 1) += b * b;
    }
    for (auto& v : cov.storage()) v /= static_cast<double>(n);
    const SymEigen eig = jacobi_eigen_sym(cov);
    // W = V diag(1/sqrt(l)) V^T
    Matrix w(2, 2);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            for (std::size_t k = 0; k < 2; ++k) {
                w(a, b) += eig.vectors(a, k) * eig.vectors(b, k) /
                           std::sqrt(eig.values[k]);
            }
        }
    }
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = g(i, 0) - mean[0];
        const double b = g(i, 1) - mean[1];
        const double w0 = w(0, 0) * a + w(0, 1) * b;
        const double w1 = w(1, 0) * a + w(1, 1) * b;
        x(i, 0) = 2.0 * w0; // sd 2 -> variance 4
        x(i, 1) = 1.0 * w1;
    }
    const PcaModel m = pca_fit(x);
    CHECK(std::fabs(m.explained_ratio[0] - 0.8) < 0.02);
    CHECK(std::fabs(m.explained_ratio[1] - 0.2) < 0.02);
    CHECK(pca_select(m, 0.69) == 1);
}

TEST_CASE("pca components are orthonormal and reconstruction is exact") {
    Rng rng(52);
    const std::size_t n = 300, d = 6;
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = rng.normal();
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = base * (static_cast<double>(j) / 3.0) + rng.normal();
        }
    }
    const PcaModel m = pca_fit(x);

    double ratio_sum = 0.0;
    for (double r : m.explained_ratio) ratio_sum += r;
    CHECK(ratio_sum == doctest::Approx(1.0).epsilon(1e-9));

    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            double dot = 0;
            for (std::size_t k = 0; k < d; ++k) dot += m.components(k, a) * m.components(k, b);
            CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
        }
    }

    const Matrix scores = pca_transform(m, x, d);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double rec = m.means[j];
            for (std::size_t k = 0; k < d; ++k) {
                rec += scores(i, k) * m.components(j, k);
            }
            CHECK(std::fabs(rec - x(i, j)) < 1e-8);
        }
    }
}

TEST_CASE("kmeans separates two blobs and matches the direct inertia") {
    Rng rng(8080);
    const std::size_t per_blob = 60;
    Matrix x(2 * per_blob, 2);
    for (std::size_t i = 0; i < per_blob; ++i) {
        x(i, 0) = rng.normal(-5, 0.3);
        x(i, 1) = rng.normal(-5, 0.3);
        x(per_blob + i, 0) = rng.normal(5, 0.3);
        x(per_blob + i, 1) = rng.normal(5, 0.3);
    }
    const KmeansResult res = kmeans(x, 2, 99);
    for (std::size_t i = 1; i < per_blob; ++i) {
        CHECK(res.labels[i] == res.labels[0]);
        CHECK(res.labels[per_blob + i] == res.labels[per_blob]);
    }
    CHECK(res.labels[0] != res.labels[per_blob]);

    // within-blob sum of squared deviations from blob means
    double expect = 0.0;
    for (int blob = 0; blob < 2; ++blob) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < per_blob; ++i) {
            mx += x(blob * per_blob + i, 0);
            my += x(blob * per_blob + i, 1);
        }
        mx /= per_blob;
        my /= per_blob;
        for (std::size_t i = 0; i < per_blob; ++i) {
            const double dx = x(blob * per_blob + i, 0) - mx;
            const double dy = x(blob * per_blob + i, 1) - my;
            expect += dx * dx + dy * dy;
        }
    }
    CHECK(res.inertia == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("kmeans with k = n has zero inertia") {
    Rng rng(4);
    Matrix x(8, 2);
    for (std::size_t i = 0; i < 8; ++i) {
        x(i, 0) = rng.uniform(0, 10);
        x(i, 1) = rng.uniform(0, 10);
    }
    const KmeansResult res = kmeans(x, 8, 1);
    CHECK(res.inertia == doctest::Approx(0.0));
}

TEST_CASE("kmeans inertia is monotone non-increasing over Lloyd iterations") {
    Rng rng(246);
    Matrix x(150, 3);
    for (std::size_t i = 0; i < 150; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal(0, 3);
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<double> trace;
        (void)kmeans(x, 5, seed, &trace);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] <= trace[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("elbow picks k = 2 for the hand-computed curve") {
    const std::vector<double> inertias = {100, 40, 35, 33, 32};
    CHECK(elbow(inertias, 1) == 2);
}

TEST_CASE("rescaling one raw column does not change the standardized matrix") {
    Rng rng(64);
    const std::size_t n = 120;
    std::vector<double> a(n), b(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal(3, 2);
        b[i] = rng.normal(-1, 4);
        y[i] = 2 * a[i] - b[i] + rng.normal(0, 0.1);
    }
    Table t1 = make_table({"a", "b"}, {a, b});
    std::vector<double> a_scaled(a);
    for (auto& v : a_scaled) v *= 1000.0;
    Table t2 = make_table({"a", "b"}, {a_scaled, b});

    const ScalerParams p1 = standardize_fit(t1, {"a", "b"});
    const ScalerParams p2 = standardize_fit(t2, {"a", "b"});
    standardize_apply(p1, t1);
    standardize_apply(p2, t2);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(t1.col("a")[i] - t2.col("a")[i]) <= 1e-12);
        CHECK(t1.col("b")[i] == t2.col("b")[i]);
    }

    const Matrix x1 = t1.to_matrix({"a", "b"});
    const Matrix x2 = t2.to_matrix({"a", "b"});
    CHECK(rfe(x1, y, 1).selected == rfe(x2, y, 1).selected);
    CHECK(kmeans(x1, 3, 7).labels == kmeans(x2, 3, 7).labels);
}
