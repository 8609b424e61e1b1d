#include "config.hpp"

#include <cstdlib>
#include <filesystem>

#include <json.hpp>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace pipeline {

using coastcast::errc;
using coastcast::raise;
using nlohmann::json;

namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).lexically_normal().string();
}

std::vector<YearPath> parse_year_paths(const json& arr,
                                       const std::filesystem::path& base) {
    std::vector<YearPath> out;
    for (const auto& item : arr) {
        YearPath yp;
        yp.year = item.at("year").get<int>();
        yp.path = resolve(base, item.at("path").get<std::string>());
        out.push_back(std::move(yp));
    }
    return out;
}

template <typename T>
void maybe(const json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

} // namespace

RunConfig load_config(const std::string& path, const CliOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(coastcast::read_file(path));
    } catch (const json::exception& e) {
        raise(errc::bad_config, std::string("config is not valid json: ") + e.what());
    }

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    RunConfig cfg;
    // no wall-clock seeding: a run is only valid with an explicit seed
    if (!doc.contains("seed") && overrides.seed < 0) {
        raise(errc::bad_config, "seed is mandatory (config key or --seed)");
    }
    try {
        maybe(doc, "seed", cfg.seed);
        maybe(doc, "threads", cfg.threads);
        if (doc.contains("out_dir")) {
            cfg.out_dir = resolve(base, doc.at("out_dir").get<std::string>());
        } else {
            cfg.out_dir = resolve(base, cfg.out_dir);
        }

        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            maybe(g, "min_lon", cfg.grid_min_lon);
            maybe(g, "max_lon", cfg.grid_max_lon);
            maybe(g, "min_lat", cfg.grid_min_lat);
            maybe(g, "max_lat", cfg.grid_max_lat);
            maybe(g, "cell_side", cfg.cell_side);
        }
        if (doc.contains("layers")) cfg.layers = parse_year_paths(doc.at("layers"), base);
        if (doc.contains("ecv")) cfg.ecv = parse_year_paths(doc.at("ecv"), base);

        if (doc.contains("synth")) {
            cfg.has_synth = true;
            const json& s = doc.at("synth");
            cfg.synth.min_lon = cfg.grid_min_lon;
            cfg.synth.max_lon = cfg.grid_max_lon;
            cfg.synth.min_lat = cfg.grid_min_lat;
            cfg.synth.max_lat = cfg.grid_max_lat;
            cfg.synth.cell_side = cfg.cell_side;
            maybe(s, "cells", cfg.synth.n_cells);
            maybe(s, "observed_years", cfg.synth.observed_years);
            maybe(s, "decline_rate", cfg.synth.decline_rate);
            maybe(s, "decline_noise_sd", cfg.synth.decline_noise_sd);
            maybe(s, "ecv_coupling", cfg.synth.ecv_coupling);
            maybe(s, "ecv_missing_frac", cfg.synth.ecv_missing_frac);
        }

        maybe(doc, "scale_factor", cfg.scale_factor);
        maybe(doc, "split_ratio", cfg.split_ratio);
        maybe(doc, "outlier_factor", cfg.outlier_factor);
        maybe(doc, "drop_outliers", cfg.drop_outliers);

        if (doc.contains("cv")) {
            maybe(doc.at("cv"), "splits", cfg.cv_splits);
            maybe(doc.at("cv"), "repeats", cfg.cv_repeats);
        }
        maybe(doc, "models", cfg.models);
        maybe(doc, "rfe_count", cfg.rfe_count);
        maybe(doc, "rfe_counts", cfg.rfe_counts);
        maybe(doc, "pca_variance_threshold", cfg.pca_variance_threshold);

        if (doc.contains("svr_grid")) {
            const json& g = doc.at("svr_grid");
            maybe(g, "c", cfg.svr_grid.c);
            maybe(g, "gamma", cfg.svr_grid.gamma);
            maybe(g, "epsilon", cfg.svr_grid.epsilon);
            if (g.contains("kernels")) {
                cfg.svr_grid.kernels.clear();
                for (const auto& k : g.at("kernels")) {
                    cfg.svr_grid.kernels.push_back(
                        coastcast::svr_kernel_from_name(k.get<std::string>()));
                }
            }
        }
        if (doc.contains("svr")) {
            maybe(doc.at("svr"), "subsample", cfg.svr_subsample);
            maybe(doc.at("svr"), "cv_folds", cfg.svr_cv_folds);
        }
        if (doc.contains("gbt")) {
            const json& g = doc.at("gbt");
            maybe(g, "rounds", cfg.gbt.rounds);
            maybe(g, "max_depth", cfg.gbt.max_depth);
            maybe(g, "learning_rate", cfg.gbt.learning_rate);
            maybe(g, "lambda", cfg.gbt.lambda);
        }
        if (doc.contains("rf")) {
            const json& r = doc.at("rf");
            maybe(r, "n_trees", cfg.rf.n_trees);
            maybe(r, "max_depth", cfg.rf.max_depth);
            maybe(r, "min_leaf", cfg.rf.min_leaf);
            maybe(r, "bootstrap", cfg.rf.bootstrap);
        }

        maybe(doc, "alpha", cfg.alpha);
        if (doc.contains("cqr")) {
            maybe(doc.at("cqr"), "alpha", cfg.cqr_alpha);
            maybe(doc.at("cqr"), "calibration_ratio", cfg.cqr_calibration_ratio);
        }
        if (doc.contains("kmeans")) {
            maybe(doc.at("kmeans"), "max_k", cfg.kmeans_max_k);
        }
        maybe(doc, "learning_curve_fractions", cfg.learning_curve_fractions);
        if (doc.contains("shap")) {
            const json& s = doc.at("shap");
            maybe(s, "rows", cfg.shap_rows);
            maybe(s, "background", cfg.shap_background);
            maybe(s, "model", cfg.shap_model);
        }
        maybe(doc, "forecast_model", cfg.forecast_model);
    } catch (const json::exception& e) {
        raise(errc::bad_config, std::string("bad config value: ") + e.what());
    }

    if (!overrides.out_dir.empty()) {
        cfg.out_dir = resolve(std::filesystem::current_path(), overrides.out_dir);
    }
    if (overrides.seed >= 0) cfg.seed = static_cast<std::uint64_t>(overrides.seed);
    if (overrides.threads >= 0) {
        cfg.threads = static_cast<std::size_t>(overrides.threads);
    } else if (const char* env = std::getenv("PIPELINE_THREADS")) {
        cfg.threads = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    }

    // synth paths are derived when layers/ecv are not listed explicitly
    if (cfg.layers.empty() && cfg.has_synth) {
        const std::filesystem::path synth_dir =
            std::filesystem::path(cfg.out_dir) / "synth";
        for (int year : cfg.synth.observed_years) {
            cfg.layers.push_back(
                {year, (synth_dir / ("layer_" + std::to_string(year) + ".wkt")).string()});
        }
        for (int year = cfg.synth.observed_years.front();
             year <= cfg.synth.observed_years.back(); ++year) {
            cfg.ecv.push_back(
                {year, (synth_dir / ("ecv_" + std::to_string(year) + ".csv")).string()});
        }
    }

    if (cfg.split_ratio <= 0.0 || cfg.split_ratio >= 1.0) {
        raise(errc::bad_config, "split_ratio must be inside (0,1)");
    }
    if (cfg.scale_factor <= 0.0) raise(errc::bad_config, "scale_factor must be > 0");
    for (const auto& m : cfg.models) (void)coastcast::model_kind_from_name(m);
    return cfg;
}

std::string RunConfig::canonical_json() const {
    json doc;
    doc["out_dir"] = out_dir;
    doc["seed"] = seed;
    doc["grid"] = {{"min_lon", grid_min_lon}, {"max_lon", grid_max_lon},
                   {"min_lat", grid_min_lat}, {"max_lat", grid_max_lat},
                   {"cell_side", cell_side}};
    json layer_arr = json::array();
    for (const auto& l : layers) layer_arr.push_back({{"year", l.year}, {"path", l.path}});
    doc["layers"] = layer_arr;
    json ecv_arr = json::array();
    for (const auto& e : ecv) ecv_arr.push_back({{"year", e.year}, {"path", e.path}});
    doc["ecv"] = ecv_arr;
    if (has_synth) {
        doc["synth"] = {{"cells", synth.n_cells},
                        {"observed_years", synth.observed_years},
                        {"decline_rate", synth.decline_rate},
                        {"decline_noise_sd", synth.decline_noise_sd},
                        {"ecv_coupling", synth.ecv_coupling},
                        {"ecv_missing_frac", synth.ecv_missing_frac}};
    }
    doc["scale_factor"] = scale_factor;
    doc["split_ratio"] = split_ratio;
    doc["outlier_factor"] = outlier_factor;
    doc["drop_outliers"] = drop_outliers;
    doc["cv"] = {{"splits", cv_splits}, {"repeats", cv_repeats}};
    doc["models"] = models;
    doc["rfe_count"] = rfe_count;
    doc["rfe_counts"] = rfe_counts;
    doc["pca_variance_threshold"] = pca_variance_threshold;
    doc["svr"] = {{"subsample", svr_subsample}, {"cv_folds", svr_cv_folds}};
    json kernels = json::array();
    for (auto k : svr_grid.kernels) kernels.push_back(coastcast::svr_kernel_name(k));
    doc["svr_grid"] = {{"c", svr_grid.c}, {"gamma", svr_grid.gamma},
                       {"epsilon", svr_grid.epsilon}, {"kernels", kernels}};
    doc["gbt"] = {{"rounds", gbt.rounds}, {"max_depth", gbt.max_depth},
                  {"learning_rate", gbt.learning_rate}, {"lambda", gbt.lambda}};
    doc["rf"] = {{"n_trees", rf.n_trees}, {"max_depth", rf.max_depth},
                 {"min_leaf", rf.min_leaf}, {"bootstrap", rf.bootstrap}};
    doc["alpha"] = alpha;
    doc["cqr"] = {{"alpha", cqr_alpha}, {"calibration_ratio", cqr_calibration_ratio}};
    doc["kmeans"] = {{"max_k", kmeans_max_k}};
    doc["learning_curve_fractions"] = learning_curve_fractions;
    doc["shap"] = {{"rows", shap_rows}, {"background", shap_background},
                   {"model", shap_model}};
    doc["forecast_model"] = forecast_model;
    return doc.dump();
}

} // namespace pipeline
