#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coastcast/models.hpp"
#include "coastcast/svr.hpp"
#include "coastcast/synth.hpp"

namespace pipeline {

struct YearPath {
    int year = 0;
    std::string path;
};

// One JSON document; CLI flags override config keys (flags > config >
// defaults). Relative paths resolve against the config file's directory.
struct RunConfig {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::size_t threads = 0; // 0 = hardware concurrency

    double grid_min_lon = coastcast::kDefaultBounds[0];
    double grid_max_lon = coastcast::kDefaultBounds[1];
    double grid_min_lat = coastcast::kDefaultBounds[2];
    double grid_max_lat = coastcast::kDefaultBounds[3];
    double cell_side = coastcast::kDefaultCellSide;

    std::vector<YearPath> layers; // .shp or .wkt by extension
    std::vector<YearPath> ecv;

    bool has_synth = false;
    coastcast::SynthConfig synth;

    double scale_factor = 1e5;
    double split_ratio = 0.8;
    double outlier_factor = 3.0;
    bool drop_outliers = false;

    std::size_t cv_splits = 10;
    std::size_t cv_repeats = 10;

    std::vector<std::string> models = {"ols", "svr", "gbt", "rf"};
    std::size_t rfe_count = 5;
    std::vector<std::size_t> rfe_counts = {5, 6, 7, 8, 9};
    double pca_variance_threshold = 0.69;

    coastcast::SvrGrid svr_grid;
    std::size_t svr_subsample = 2000;
    std::size_t svr_cv_folds = 3;

    coastcast::GbtParams gbt;
    coastcast::RfParams rf;

    double alpha = 0.05;
    double cqr_alpha = 0.1;
    double cqr_calibration_ratio = 0.25;

    std::size_t kmeans_max_k = 10;
    std::vector<double> learning_curve_fractions = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                    0.6, 0.7, 0.8, 0.9, 1.0};

    std::size_t shap_rows = 40;
    std::size_t shap_background = 40;
    std::string shap_model = "gbt";
    std::string forecast_model = "best";

    // canonical serialization used for the config hash
    std::string canonical_json() const;
};

struct CliOverrides {
    std::string out_dir;
    std::int64_t seed = -1;
    std::int64_t threads = -1;
};

RunConfig load_config(const std::string& path, const CliOverrides& overrides);

} // namespace pipeline
