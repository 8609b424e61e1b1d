#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coastcast/features.hpp"
#include "coastcast/rng.hpp"
#include "coastcast/trees.hpp"

#include "../helpers.hpp"

using namespace coastcast;

namespace {

double predict_first_k(const GbtModel& m, std::span<const double> x, int k) {
    double s = 0.0;
    for (int t = 0; t < k; ++t) s += m.trees[static_cast<std::size_t>(t)].predict_row(x);
    return s;
}

// exhaustive single-split scan; the depth-1 oracle
struct BestSplit {
    int feature;
    double threshold;
    double left_mean, right_mean;
};

BestSplit brute_force_split(const Matrix& x, const std::vector<double>& y) {
    BestSplit best{-1, 0, 0, 0};
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t t = 0; t + 1 < vals.size(); ++t) {
            const double thr = vals[t] + (vals[t + 1] - vals[t]) / 2.0;
            double ls = 0, rs = 0;
            std::size_t ln = 0, rn = 0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                if (x(i, f) <= thr) {
                    ls += y[i];
                    ++ln;
                } else {
                    rs += y[i];
                    ++rn;
                }
            }
            const double lm = ls / static_cast<double>(ln);
            const double rm = rs / static_cast<double>(rn);
            double sse = 0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const double mu = x(i, f) <= thr ? lm : rm;
                sse += (y[i] - mu) * (y[i] - mu);
            }
            if (sse < best_sse) {
                best_sse = sse;
                best = {static_cast<int>(f), thr, lm, rm};
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("gbt depth-0 single round is the shrunk regularized mean") {
    Matrix x(4, 1);
    std::vector<double> y = {1, 2, 3, 6};
    for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
    const double ybar = 3.0;

    GbtParams p;
    p.rounds = 1;
    p.max_depth = 0;
    p.lambda = 0.0;
    p.learning_rate = 1.0;
    const GbtModel exact = fit_gbt(x, y, p);
    CHECK(exact.predict_row(x.row(0)) == doctest::Approx(ybar));

    p.lambda = 1.0;
    p.learning_rate = 0.1;
    const GbtModel shrunk = fit_gbt(x, y, p);
    CHECK(shrunk.predict_row(x.row(0)) ==
          doctest::Approx(0.1 * ybar * 4.0 / (4.0 + 1.0)));
}

TEST_CASE("gbt training mse never increases over 200 rounds") {
    Rng rng(77);
    const std::size_t n = 150;
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(-3, 3);
        y[i] = std::sin(x(i, 0)) + 0.2 * x(i, 0);
    }
    GbtParams p;
    p.rounds = 200;
    const GbtModel m = fit_gbt(x, y, p);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 200; ++k) {
        double mse = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = y[i] - predict_first_k(m, x.row(i), k);
            mse += e * e;
        }
        CHECK(mse <= prev + 1e-9);
        prev = mse;
    }
}

TEST_CASE("gbt depth-1 single round recovers the brute-force best split") {
    Rng rng(8);
    const std::size_t n = 60;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(0, 1);
        x(i, 1) = rng.uniform(0, 1);
        y[i] = x(i, 0) < 0.37 ? -2.0 : 5.0; // step in feature 0
    }
    GbtParams p;
    p.rounds = 1;
    p.max_depth = 1;
    p.lambda = 0.0;
    p.learning_rate = 1.0;
    const GbtModel m = fit_gbt(x, y, p);
    const BestSplit oracle = brute_force_split(x, y);
    REQUIRE(oracle.feature == 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double expect =
            x(i, oracle.feature) <= oracle.threshold ? oracle.left_mean
                                                     : oracle.right_mean;
        CHECK(m.predict_row(x.row(i)) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("single unbagged tree memorizes distinct training rows") {
    Rng rng(3);
    const std::size_t n = 50;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        y[i] = rng.normal();
    }
    RfParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.max_depth = -1;
    p.min_leaf = 1;
    const RfModel m = fit_rf(x, y, p, 1);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(m.predict_row(x.row(i)) == doctest::Approx(y[i]).epsilon(1e-12));
    }
}

TEST_CASE("forest prediction is the mean of its trees") {
    Rng rng(16);
    Matrix x(40, 3);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
        y[i] = x(i, 0) + rng.normal(0, 0.2);
    }
    RfParams p;
    p.n_trees = 7;
    const RfModel m = fit_rf(x, y, p, 9);
    std::vector<double> probe = {0.3, -1.2, 0.8};
    double mean = 0;
    for (const Tree& t : m.trees) mean += t.predict_row(probe);
    mean /= 7.0;
    CHECK(m.predict_row(probe) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("forest on a constant target predicts that constant") {
    Rng rng(19);
    Matrix x(30, 2);
    std::vector<double> y(30, 4.5);
    for (std::size_t i = 0; i < 30; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
    }
    RfParams p;
    p.n_trees = 12;
    const RfModel m = fit_rf(x, y, p, 123);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> probe = {rng.normal(), rng.normal()};
        CHECK(m.predict_row(probe) == doctest::Approx(4.5));
    }
}

TEST_CASE("gbt and rf are deterministic for a fixed seed") {
    Rng rng(31);
    const std::size_t n = 80;
    Matrix x(n, 3);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
        y[i] = 2 * x(i, 0) - x(i, 2) + rng.normal(0, 0.3);
    }
    GbtParams gp;
    gp.rounds = 30;
    const GbtModel g1 = fit_gbt(x, y, gp);
    const GbtModel g2 = fit_gbt(x, y, gp);
    RfParams rp;
    rp.n_trees = 20;
    const RfModel r1 = fit_rf(x, y, rp, 77);
    const RfModel r2 = fit_rf(x, y, rp, 77);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(g1.predict_row(x.row(i)) == g2.predict_row(x.row(i)));
        CHECK(r1.predict_row(x.row(i)) == r2.predict_row(x.row(i)));
    }
}

TEST_CASE("gbt predictions are row-order invariant within tolerance") {
    Rng rng(37);
    const std::size_t n = 70;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        y[i] = x(i, 0) * x(i, 1) + rng.normal(0, 0.1);
    }
    const auto perm = rng.permutation(n);
    Matrix xp(n, 2);
    std::vector<double> yp(n);
    for (std::size_t i = 0; i < n; ++i) {
        xp(i, 0) = x(perm[i], 0);
        xp(i, 1) = x(perm[i], 1);
        yp[i] = y[perm[i]];
    }
    GbtParams p;
    p.rounds = 40;
    const GbtModel a = fit_gbt(x, y, p);
    const GbtModel b = fit_gbt(xp, yp, p);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(a.predict_row(x.row(i)) ==
              doctest::Approx(b.predict_row(x.row(i))).epsilon(1e-9));
    }
}

TEST_CASE("quantile gbt constant model is the tau-quantile of y") {
    Matrix x(5, 1);
    std::vector<double> y = {3, 1, 4, 1, 5};
    for (std::size_t i = 0; i < 5; ++i) x(i, 0) = static_cast<double>(i);
    GbtParams p;
    p.rounds = 1;
    p.max_depth = 0;
    p.learning_rate = 1.0;
    const QuantileGbtModel m = fit_quantile_gbt(x, y, 0.9, p);
    CHECK(m.predict_row(x.row(0)) ==
          doctest::Approx(quantile(y, 0.9)).epsilon(1e-12));
}

TEST_CASE("pinball loss on train never increases per boosting round") {
    Rng rng(41);
    const std::size_t n = 200;
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(0, 1);
        y[i] = x(i, 0) + rng.uniform(-1, 1);
    }
    GbtParams p;
    p.rounds = 60;
    p.max_depth = 2;
    const QuantileGbtModel m = fit_quantile_gbt(x, y, 0.5, p);
    std::vector<double> f(n, 0.0);
    double prev = pinball_loss(y, f, 0.5);
    for (const Tree& t : m.trees) {
        for (std::size_t i = 0; i < n; ++i) f[i] += t.predict_row(x.row(i));
        const double loss = pinball_loss(y, f, 0.5);
        CHECK(loss <= prev + 1e-12);
        prev = loss;
    }
}

TEST_CASE("median quantile model tracks the conditional median") {
    Rng rng(4242);
    const std::size_t n = 5000;
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(0, 1);
        y[i] = x(i, 0) + rng.uniform(-1, 1); // conditional median = x
    }
    GbtParams p;
    p.rounds = 150;
    p.max_depth = 3;
    p.learning_rate = 0.1;
    const QuantileGbtModel m = fit_quantile_gbt(x, y, 0.5, p);
    for (double probe = 0.2; probe <= 0.8001; probe += 0.05) {
        const double xq[1] = {probe};
        CHECK(std::fabs(m.predict_row(xq) - probe) <= 0.15);
    }
}
