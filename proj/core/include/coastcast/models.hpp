#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coastcast/linalg.hpp"
#include "coastcast/score.hpp"

namespace coastcast {

class Model {
public:
    virtual ~Model() = default;
    virtual std::string kind() const = 0;
    virtual double predict_row(std::span<const double> x) const = 0;
};

std::vector<double> predict(const Model& model, const Matrix& x);

// Ordinary least squares with intercept, solved by Householder QR.
class LinearModel final : public Model {
public:
    double intercept = 0.0;
    std::vector<double> coefficients;

    std::string kind() const override { return "ols"; }
    double predict_row(std::span<const double> x) const override;
};

LinearModel fit_ols(const Matrix& x, std::span<const double> y);

Scores metrics(std::span<const double> y, std::span<const double> yhat);

enum class SvrKernel { linear, rbf, poly };

const char* svr_kernel_name(SvrKernel k);
SvrKernel svr_kernel_from_name(std::string_view name);

struct SvrHyperParams {
    double c = 1.0;
    double gamma = 1.0;
    double epsilon = 0.1;
    SvrKernel kernel = SvrKernel::linear;
};

struct GbtParams {
    int rounds = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    double lambda = 1.0; // leaf regularization: value = sum(residual)/(count + lambda)
};

struct RfParams {
    int n_trees = 100;
    int max_depth = -1; // unlimited
    int min_leaf = 1;
    bool bootstrap = true;
    int features_per_split = 0; // 0 = ceil(d/3)
};

enum class ModelKind { ols, svr, gbt, rf, quantile_gbt };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(std::string_view name);

struct ModelSpec {
    ModelKind kind = ModelKind::ols;
    SvrHyperParams svr{};
    GbtParams gbt{};
    RfParams rf{};
    double tau = 0.5; // quantile_gbt
    std::uint64_t seed = 0;
};

std::unique_ptr<Model> fit_model(const ModelSpec& spec, const Matrix& x,
                                 std::span<const double> y);

// Self-describing text artifact with a magic string and schema version.
std::string serialize_model(const Model& model);
std::unique_ptr<Model> deserialize_model(std::string_view text);

} // namespace coastcast
