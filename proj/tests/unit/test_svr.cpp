#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coastcast/error.hpp"
#include "coastcast/models.hpp"
#include "coastcast/rng.hpp"
#include "coastcast/svr.hpp"

#include "../helpers.hpp"

using namespace coastcast;

namespace {

void linear_data(Rng& rng, std::size_t n, std::size_t d, Matrix& x,
                 std::vector<double>& y, double noise_sd) {
    x = Matrix(n, d);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.3;
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = rng.normal();
            s += (0.5 + static_cast<double>(j)) * x(i, j);
        }
        y[i] = s + (noise_sd > 0 ? rng.normal(0, noise_sd) : 0.0);
    }
}

} // namespace

TEST_CASE("linear svr fits perfectly linear data to high R2") {
    Rng rng(1001);
    Matrix x_train, x_test;
    std::vector<double> y_train, y_test;
    linear_data(rng, 120, 3, x_train, y_train, 0.0);
    linear_data(rng, 60, 3, x_test, y_test, 0.0);

    SvrHyperParams params{100.0, 1.0, 1e-4, SvrKernel::linear};
    const SvrModel m = fit_svr(x_train, y_train, params);
    const Scores s = metrics(y_test, predict(m, x_test));
    CHECK(s.r2 >= 0.999);
    CHECK(m.kkt_violation <= 1e-3);
}

TEST_CASE("targets inside the epsilon tube give the zero model") {
    Rng rng(2);
    Matrix x(30, 2);
    std::vector<double> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        y[i] = rng.uniform(-0.05, 0.05);
    }
    SvrHyperParams params{10.0, 1.0, 0.1, SvrKernel::rbf};
    const SvrModel m = fit_svr(x, y, params);
    CHECK(m.beta.empty()); // all dual variables stayed at zero
    CHECK(m.predict_row(x.row(0)) == 0.0);
}

TEST_CASE("dual coefficients respect the box constraint on any data") {
    Rng rng(33);
    for (SvrKernel k : {SvrKernel::linear, SvrKernel::rbf, SvrKernel::poly}) {
        Matrix x;
        std::vector<double> y;
        linear_data(rng, 60, 2, x, y, 1.0);
        for (auto& v : y) v *= 50.0; // strain the box
        SvrHyperParams params{1.0, 0.5, 0.01, k};
        const SvrModel m = fit_svr(x, y, params);
        for (double b : m.beta) {
            CHECK(std::fabs(b) <= params.c + 1e-12);
        }
        CHECK(svr_kkt_violation(m, x, y) <= 1e-3);
    }
}

TEST_CASE("the recomputed KKT violation agrees with the solver's") {
    Rng rng(12);
    Matrix x;
    std::vector<double> y;
    linear_data(rng, 80, 3, x, y, 0.2);
    SvrHyperParams params{10.0, 1.0, 0.01, SvrKernel::linear};
    const SvrModel m = fit_svr(x, y, params);
    CHECK(m.kkt_violation <= 1e-3);
    CHECK(svr_kkt_violation(m, x, y) <= 1e-3 + 1e-9);
}

TEST_CASE("starved pass budget raises NoConvergence with the violation") {
    Rng rng(9);
    Matrix x;
    std::vector<double> y;
    linear_data(rng, 100, 3, x, y, 0.5);
    for (auto& v : y) v *= 100.0;
    SvrHyperParams params{100.0, 1.0, 1e-4, SvrKernel::linear};
    try {
        (void)fit_svr(x, y, params, 1e-3, 0); // a single pass cannot finish
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == errc::no_convergence);
        CHECK(std::string(e.what()).find("KKT") != std::string::npos);
    }
}

TEST_CASE("rbf and poly kernels evaluate their stated formulas") {
    SvrHyperParams p;
    p.gamma = 0.5;
    const std::vector<double> a = {1.0, 2.0};
    const std::vector<double> b = {0.0, 1.0};
    p.kernel = SvrKernel::linear;
    CHECK(svr_kernel(p, a, b) == doctest::Approx(2.0));
    p.kernel = SvrKernel::rbf;
    CHECK(svr_kernel(p, a, b) == doctest::Approx(std::exp(-0.5 * 2.0)));
    p.kernel = SvrKernel::poly;
    CHECK(svr_kernel(p, a, b) == doctest::Approx(std::pow(0.5 * 2.0 + 1.0, 3)));
}

TEST_CASE("grid of size one returns that cell") {
    Rng rng(70);
    Matrix x;
    std::vector<double> y;
    linear_data(rng, 40, 2, x, y, 0.05);
    SvrGrid grid;
    grid.c = {10.0};
    grid.gamma = {1.0};
    grid.epsilon = {0.01};
    grid.kernels = {SvrKernel::rbf};
    const SvrGridResult res = grid_search_svr(x, y, grid, 3, 5);
    CHECK(res.cells.size() == 1);
    CHECK(res.best.kernel == SvrKernel::rbf);
    CHECK(res.best.c == 10.0);
}

TEST_CASE("the default grid enumerates 36 cells in deterministic order") {
    Rng rng(71);
    Matrix x;
    std::vector<double> y;
    linear_data(rng, 30, 2, x, y, 0.05);
    const SvrGridResult res = grid_search_svr(x, y, SvrGrid{}, 3, 5);
    CHECK(res.cells.size() == 36);
    // iteration order: C, then gamma, then epsilon, then kernel
    CHECK(res.cells[0].params.c == 0.1);
    CHECK(res.cells[0].params.kernel == SvrKernel::linear);
    CHECK(res.cells[1].params.kernel == SvrKernel::rbf);
    CHECK(res.cells[2].params.kernel == SvrKernel::poly);
    CHECK(res.cells[35].params.c == 100.0);
    CHECK(res.cells[35].params.epsilon == 0.0001);
}

TEST_CASE("grid search picks the linear kernel on noisy linear data") {
    Rng rng(70);
    Matrix x;
    std::vector<double> y;
    linear_data(rng, 150, 4, x, y, 0.15);
    const SvrGridResult res = grid_search_svr(x, y, SvrGrid{}, 3, 7);
    CHECK(res.best.kernel == SvrKernel::linear);
    CHECK(res.best_mean_r2 > 0.98);
}
