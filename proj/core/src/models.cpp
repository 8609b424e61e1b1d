#include "coastcast/models.hpp"

#include <cmath>

#include "coastcast/error.hpp"
#include "coastcast/svr.hpp"
#include "coastcast/trees.hpp"

namespace coastcast {

std::vector<double> predict(const Model& model, const Matrix& x) {
    std::vector<double> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(model.predict_row(x.row(i)));
    return out;
}

double LinearModel::predict_row(std::span<const double> x) const {
    double s = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j) s += coefficients[j] * x[j];
    return s;
}

LinearModel fit_ols(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < d + 1) raise(errc::rank_deficient, "need at least d+1 rows");

    Matrix design(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < d; ++j) design(i, j + 1) = x(i, j);
    }
    const std::vector<double> beta = solve_least_squares(design, y);

    LinearModel model;
    model.intercept = beta[0];
    model.coefficients.assign(beta.begin() + 1, beta.end());
    return model;
}

Scores metrics(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty()) {
        raise(errc::bad_argument, "metrics: size mismatch or empty");
    }
    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;

    double ss_res = 0.0, abs_sum = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - yhat[i];
        ss_res += e * e;
        abs_sum += std::fabs(e);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }

    Scores s;
    s.mse = ss_res / n;
    s.mae = abs_sum / n;
    if (ss_tot == 0.0) {
        s.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    } else {
        s.r2 = 1.0 - ss_res / ss_tot;
    }
    return s;
}

const char* svr_kernel_name(SvrKernel k) {
    switch (k) {
    case SvrKernel::linear: return "linear";
    case SvrKernel::rbf: return "rbf";
    case SvrKernel::poly: return "poly";
    }
    return "?";
}

SvrKernel svr_kernel_from_name(std::string_view name) {
    if (name == "linear") return SvrKernel::linear;
    if (name == "rbf") return SvrKernel::rbf;
    if (name == "poly") return SvrKernel::poly;
    raise(errc::bad_argument, "unknown svr kernel '" + std::string(name) + "'");
}

const char* model_kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::ols: return "ols";
    case ModelKind::svr: return "svr";
    case ModelKind::gbt: return "gbt";
    case ModelKind::rf: return "rf";
    case ModelKind::quantile_gbt: return "quantile_gbt";
    }
    return "?";
}

ModelKind model_kind_from_name(std::string_view name) {
    if (name == "ols") return ModelKind::ols;
    if (name == "svr") return ModelKind::svr;
    if (name == "gbt") return ModelKind::gbt;
    if (name == "rf") return ModelKind::rf;
    if (name == "quantile_gbt") return ModelKind::quantile_gbt;
    raise(errc::bad_argument, "unknown model kind '" + std::string(name) + "'");
}

std::unique_ptr<Model> fit_model(const ModelSpec& spec, const Matrix& x,
                                 std::span<const double> y) {
    switch (spec.kind) {
    case ModelKind::ols:
        return std::make_unique<LinearModel>(fit_ols(x, y));
    case ModelKind::svr:
        return std::make_unique<SvrModel>(fit_svr(x, y, spec.svr));
    case ModelKind::gbt:
        return std::make_unique<GbtModel>(fit_gbt(x, y, spec.gbt));
    case ModelKind::rf:
        return std::make_unique<RfModel>(fit_rf(x, y, spec.rf, spec.seed));
    case ModelKind::quantile_gbt:
        return std::make_unique<QuantileGbtModel>(
            fit_quantile_gbt(x, y, spec.tau, spec.gbt));
    }
    raise(errc::bad_argument, "unhandled model kind");
}

} // namespace coastcast
