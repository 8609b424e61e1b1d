#include "stages.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "coastcast/cqr.hpp"
#include "coastcast/csv.hpp"
#include "coastcast/cv.hpp"
#include "coastcast/ecv.hpp"
#include "coastcast/error.hpp"
#include "coastcast/features.hpp"
#include "coastcast/forecast.hpp"
#include "coastcast/geometry.hpp"
#include "coastcast/grid.hpp"
#include "coastcast/panel.hpp"
#include "coastcast/rng.hpp"
#include "coastcast/shapefile.hpp"
#include "coastcast/shapley.hpp"
#include "coastcast/stats.hpp"
#include "coastcast/svg.hpp"
#include "coastcast/svr.hpp"
#include "coastcast/synth.hpp"
#include "coastcast/table.hpp"
#include "coastcast/trees.hpp"
#include "coastcast/wkt.hpp"

namespace pipeline {

using namespace coastcast;
using nlohmann::json;

std::string StageContext::out_path(const std::string& rel) const {
    return cfg.out_dir + "/" + rel;
}

void StageContext::write_artifact(StageEntry& entry, const std::string& rel,
                                  std::string_view content) const {
    const std::string path = out_path(rel);
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    write_file_atomic(path, content);
    entry.outputs[rel] = checksum_hex(content);
}

std::string StageContext::read_artifact(StageEntry& entry,
                                        const std::string& rel) const {
    const std::string path = out_path(rel);
    if (!std::filesystem::exists(path)) {
        raise(errc::missing_artifact,
              rel + " not found; run the producing stage first");
    }
    std::string content = read_file(path);
    const std::string checksum = checksum_hex(content);
    const std::string recorded = manifest.recorded_output(rel);
    if (!recorded.empty() && recorded != checksum) {
        raise(errc::missing_artifact,
              rel + " does not match the manifest checksum; rerun the "
                    "producing stage");
    }
    entry.inputs[rel] = checksum;
    return content;
}

std::string StageContext::read_input(StageEntry& entry,
                                     const std::string& abs_path) const {
    if (!std::filesystem::exists(abs_path)) {
        raise(errc::missing_artifact, "input file missing: " + abs_path);
    }
    std::string content = read_file(abs_path);
    entry.inputs[abs_path] = checksum_hex(content);
    return content;
}

namespace {

GridSpec config_grid(const RunConfig& cfg) {
    return generate_grid(cfg.grid_min_lon, cfg.grid_max_lon, cfg.grid_min_lat,
                         cfg.grid_max_lat, cfg.cell_side);
}

VectorLayer load_layer_file(const std::string& path, int year) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".shp") return read_shapefile_layer(path, year);
    if (ext == ".wkt" || ext == ".txt") return read_wkt_layer(path, year);
    raise(errc::bad_config, "unknown layer format " + path + " (.shp or .wkt)");
}

// fold scores serialize one row per fold
std::string score_report_csv(const ScoreReport& report, std::size_t splits) {
    CsvWriter w({"model", "input_variant", "repeat", "fold", "mse", "mae", "r2"});
    for (std::size_t i = 0; i < report.folds.size(); ++i) {
        w.field(report.model);
        w.field(report.input_variant);
        w.field(static_cast<long>(splits ? i / splits : 0));
        w.field(static_cast<long>(splits ? i % splits : i));
        w.field(report.folds[i].mse);
        w.field(report.folds[i].mae);
        w.field(report.folds[i].r2);
        w.end_row();
    }
    return w.str();
}

ScoreReport score_report_from_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text);
    ScoreReport report;
    std::size_t line = 1;
    for (const auto& row : doc.rows) {
        ++line;
        report.model = row[0];
        report.input_variant = row[1];
        report.folds.push_back(FoldScore{parse_double(row[4], line),
                                         parse_double(row[5], line),
                                         parse_double(row[6], line)});
    }
    return report;
}

std::string variant_file_tag(const std::string& variant) {
    std::string tag;
    for (char c : variant) {
        if (std::isalnum(static_cast<unsigned char>(c))) tag += c;
    }
    return tag;
}

struct FeatureBundle {
    Table train;
    Table test;
    std::vector<std::string> predictors;
    std::vector<std::size_t> rfe_selected;
    std::vector<std::size_t> rfe_elimination_order;
    PcaModel pca;
    std::size_t pca_k = 0;
    ScalerParams scaler;
};

FeatureBundle load_feature_bundle(StageContext& ctx, StageEntry& entry) {
    FeatureBundle fb;
    fb.train = Table::from_csv(ctx.read_artifact(entry, "features_train.csv"));
    fb.test = Table::from_csv(ctx.read_artifact(entry, "features_test.csv"));

    json doc;
    try {
        doc = json::parse(ctx.read_artifact(entry, "features_model.json"));
    } catch (const json::exception& e) {
        raise(errc::missing_artifact,
              std::string("features_model.json unreadable: ") + e.what());
    }
    fb.predictors = doc.at("predictors").get<std::vector<std::string>>();
    fb.rfe_selected = doc.at("rfe_selected").get<std::vector<std::size_t>>();
    fb.rfe_elimination_order =
        doc.at("rfe_elimination_order").get<std::vector<std::size_t>>();
    const json& p = doc.at("pca");
    fb.pca.means = p.at("means").get<std::vector<double>>();
    fb.pca.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
    fb.pca.explained_ratio = p.at("ratios").get<std::vector<double>>();
    const auto comp = p.at("components").get<std::vector<std::vector<double>>>();
    fb.pca.components = Matrix(comp.size(), comp.empty() ? 0 : comp[0].size());
    for (std::size_t i = 0; i < comp.size(); ++i) {
        for (std::size_t j = 0; j < comp[i].size(); ++j) {
            fb.pca.components(i, j) = comp[i][j];
        }
    }
    fb.pca_k = p.at("k").get<std::size_t>();
    const json& s = doc.at("scaler");
    fb.scaler.columns = s.at("columns").get<std::vector<std::string>>();
    fb.scaler.mean = s.at("mean").get<std::vector<double>>();
    fb.scaler.stddev = s.at("std").get<std::vector<double>>();
    return fb;
}

// rfe sets are nested: selection for n keeps everything not eliminated in
// the first (d - n) removals
std::vector<std::size_t> rfe_selection_for(const FeatureBundle& fb, std::size_t n) {
    const std::size_t d = fb.predictors.size();
    if (n >= d) {
        std::vector<std::size_t> all(d);
        for (std::size_t i = 0; i < d; ++i) all[i] = i;
        return all;
    }
    std::vector<bool> eliminated(d, false);
    for (std::size_t i = 0; i < d - n && i < fb.rfe_elimination_order.size(); ++i) {
        eliminated[fb.rfe_elimination_order[i]] = true;
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d; ++i) {
        if (!eliminated[i]) keep.push_back(i);
    }
    return keep;
}

Matrix select_matrix_columns(const Matrix& x, const std::vector<std::size_t>& cols) {
    Matrix out(x.rows(), cols.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = x(i, cols[j]);
    }
    return out;
}

void subsample_rows(const Matrix& x, std::span<const double> y, std::size_t limit,
                    std::uint64_t seed, Matrix& xs, std::vector<double>& ys) {
    const std::size_t n = x.rows();
    if (n <= limit) {
        xs = x;
        ys.assign(y.begin(), y.end());
        return;
    }
    Rng rng = Rng(seed).fork(0x5b5);
    auto perm = rng.permutation(n);
    perm.resize(limit);
    std::sort(perm.begin(), perm.end());
    xs = Matrix(limit, x.cols());
    ys.resize(limit);
    for (std::size_t i = 0; i < limit; ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) xs(i, j) = x(perm[i], j);
        ys[i] = y[perm[i]];
    }
}

ModelSpec spec_for(const RunConfig& cfg, const std::string& kind_name,
                   const SvrHyperParams& svr_params) {
    ModelSpec spec;
    spec.kind = model_kind_from_name(kind_name);
    spec.svr = svr_params;
    spec.gbt = cfg.gbt;
    spec.rf = cfg.rf;
    spec.seed = cfg.seed;
    return spec;
}

} // namespace

void cmd_synth(StageContext& ctx) {
    if (!ctx.cfg.has_synth) {
        raise(errc::bad_config, "config has no synth section");
    }
    SynthConfig synth_cfg = ctx.cfg.synth;
    synth_cfg.seed = ctx.cfg.seed;
    const SynthWorld world = generate_synthetic_world(synth_cfg);

    StageEntry entry;
    for (const VectorLayer& layer : world.layers) {
        ctx.write_artifact(entry, "synth/layer_" + std::to_string(layer.year) + ".wkt",
                           layer_to_wkt(layer));
    }
    for (const EcvGrid& grid : world.ecv_grids) {
        ctx.write_artifact(entry, "synth/ecv_" + std::to_string(grid.year) + ".csv",
                           ecv_to_csv(grid));
    }
    ctx.manifest.record_stage("synth", std::move(entry));
    std::cout << "synth: " << world.layers.size() << " layers, "
              << world.ecv_grids.size() << " ecv grids\n";
}

void cmd_grid(StageContext& ctx) {
    const GridSpec grid = config_grid(ctx.cfg);
    CsvWriter w({"cell_id", "left", "top", "bottom", "right"});
    for (std::size_t id = 0; id < grid.cell_count(); ++id) {
        const Cell c = cell_by_id(grid, static_cast<long>(id));
        w.field(c.cell_id);
        w.field(c.left);
        w.field(c.top);
        w.field(c.bottom);
        w.field(c.right);
        w.end_row();
    }
    StageEntry entry;
    ctx.write_artifact(entry, "grid.csv", w.str());
    ctx.manifest.record_stage("grid", std::move(entry));
    std::cout << "grid: " << grid.n_cols << "x" << grid.n_rows << " cells\n";
}

void cmd_intersect(StageContext& ctx) {
    if (ctx.cfg.layers.empty()) raise(errc::bad_config, "no layers configured");
    const GridSpec grid = config_grid(ctx.cfg);

    StageEntry entry;
    std::vector<CellYearRecord> all_records;
    CsvWriter fix_report({"year", "polygons_in", "polygons_kept",
                          "polygons_dropped", "holes_dropped",
                          "self_intersecting_rings"});
    for (const YearPath& yp : ctx.cfg.layers) {
        (void)ctx.read_input(entry, yp.path);
        VectorLayer layer = load_layer_file(yp.path, yp.year);
        const FixLayerReport report = fix_layer(layer);
        fix_report.field(yp.year);
        fix_report.field(static_cast<long>(report.polygons_in));
        fix_report.field(static_cast<long>(report.polygons_kept));
        fix_report.field(static_cast<long>(report.polygons_dropped));
        fix_report.field(static_cast<long>(report.holes_dropped));
        fix_report.field(static_cast<long>(report.self_intersecting_rings));
        fix_report.end_row();

        const auto records = intersect_layer(layer, grid, ctx.cfg.threads);
        all_records.insert(all_records.end(), records.begin(), records.end());
    }
    std::sort(all_records.begin(), all_records.end(),
              [](const CellYearRecord& a, const CellYearRecord& b) {
                  return a.year != b.year ? a.year < b.year : a.cell_id < b.cell_id;
              });
    ctx.write_artifact(entry, "intersect.csv", records_to_csv(all_records));
    ctx.write_artifact(entry, "fix_report.csv", fix_report.str());
    ctx.manifest.record_stage("intersect", std::move(entry));
    std::cout << "intersect: " << all_records.size() << " cell-year records\n";
}

void cmd_panel(StageContext& ctx) {
    StageEntry entry;
    const auto records = records_from_csv(ctx.read_artifact(entry, "intersect.csv"));

    std::map<int, std::vector<CellYearRecord>> by_year;
    for (const auto& r : records) by_year[r.year].push_back(r);
    std::vector<std::vector<CellYearRecord>> yearly;
    for (auto& [year, rows] : by_year) yearly.push_back(std::move(rows));

    const Panel aligned = align_cells(yearly);
    const Panel full = interpolate_years(aligned);
    const SupervisedTable supervised = build_supervised(full);

    ctx.write_artifact(entry, "panel.csv", panel_to_csv(full));
    ctx.write_artifact(entry, "supervised.csv", supervised_to_csv(supervised));
    ctx.manifest.record_stage("panel", std::move(entry));
    std::cout << "panel: " << full.rows.size() << " rows, supervised "
              << supervised.rows.size() << " rows\n";
}

void cmd_join(StageContext& ctx) {
    if (ctx.cfg.ecv.empty()) raise(errc::bad_config, "no ecv inputs configured");
    StageEntry entry;
    const SupervisedTable supervised =
        supervised_from_csv(ctx.read_artifact(entry, "supervised.csv"));

    std::map<int, EcvGrid> grids;
    CsvWriter fill_report({"year", "channel", "status"});
    for (const YearPath& yp : ctx.cfg.ecv) {
        const EcvGrid raw = load_ecv_csv(ctx.read_input(entry, yp.path));
        if (raw.year != yp.year) {
            raise(errc::bad_config, yp.path + " declares year " +
                                        std::to_string(raw.year) + ", config says " +
                                        std::to_string(yp.year));
        }
        FillResult filled = fill_missing_nearest(raw);
        for (std::size_t c : filled.all_missing_channels) {
            fill_report.field(yp.year);
            fill_report.field(std::string_view(kEcvChannelNames[c]));
            fill_report.field(std::string_view("all_missing"));
            fill_report.end_row();
        }
        grids.emplace(yp.year, std::move(filled.grid));
    }

    const Table features = join_cells(supervised, grids);
    ctx.write_artifact(entry, "features.csv", features.to_csv());
    ctx.write_artifact(entry, "ecv_fill_report.csv", fill_report.str());
    ctx.manifest.record_stage("join", std::move(entry));
    std::cout << "join: " << features.n_rows() << " feature rows\n";
}

void cmd_features(StageContext& ctx) {
    StageEntry entry;
    Table features = Table::from_csv(ctx.read_artifact(entry, "features.csv"));
    const Panel panel = panel_from_csv(ctx.read_artifact(entry, "panel.csv"), {});

    // EDA: correlation matrix over the numeric data columns
    Table numeric = features;
    numeric.drop_column("cell_id");
    numeric.drop_column("year");
    const CorrelationResult corr = correlation_matrix(numeric);
    {
        std::vector<std::string> header = {"column"};
        header.insert(header.end(), corr.columns.begin(), corr.columns.end());
        CsvWriter w(header);
        for (std::size_t i = 0; i < corr.columns.size(); ++i) {
            w.field(corr.columns[i]);
            for (std::size_t j = 0; j < corr.columns.size(); ++j) {
                w.field(corr.matrix(i, j));
            }
            w.end_row();
        }
        ctx.write_artifact(entry, "correlation.csv", w.str());
        ctx.write_artifact(entry, "correlation_heatmap.svg",
                           svg_heatmap(corr.columns, corr.matrix,
                                       "feature correlation"));
    }

    // EDA: year-over-year area differences
    {
        const std::vector<double> diffs = area_differences(panel);
        const Histogram h = histogram(diffs, 40);
        CsvWriter w({"bin_left", "bin_right", "count"});
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            w.field(h.edges[i]);
            w.field(h.edges[i + 1]);
            w.field(static_cast<long>(h.counts[i]));
            w.end_row();
        }
        ctx.write_artifact(entry, "area_diff_histogram.csv", w.str());
        ctx.write_artifact(entry, "area_diff_histogram.svg",
                           svg_histogram(h, "year-over-year area change"));
    }

    // outliers are reported per column; dropping is opt-in and keyed on area
    {
        CsvWriter w({"column", "outliers"});
        std::vector<std::size_t> area_outliers;
        for (const auto& name : numeric.columns) {
            const auto idx = iqr_outliers(numeric.col(name), ctx.cfg.outlier_factor);
            if (name == "area") area_outliers = idx;
            w.field(name);
            w.field(static_cast<long>(idx.size()));
            w.end_row();
        }
        ctx.write_artifact(entry, "outliers.csv", w.str());
        if (ctx.cfg.drop_outliers && !area_outliers.empty()) {
            std::vector<bool> drop(features.n_rows(), false);
            for (std::size_t i : area_outliers) drop[i] = true;
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < features.n_rows(); ++i) {
                if (!drop[i]) keep.push_back(i);
            }
            features = features.take_rows(keep);
        }
    }

    // zero-variance predictors go before any scaling
    std::vector<std::string> predictors = kPredictorColumns;
    {
        const auto removed = remove_zero_variance(features, predictors);
        for (const auto& name : removed) {
            predictors.erase(std::remove(predictors.begin(), predictors.end(), name),
                             predictors.end());
        }
    }

    scale_columns(features, {"area", "perimeter", "area_next"}, ctx.cfg.scale_factor);

    const auto [train_rows, test_rows] =
        split_train_test(features.n_rows(), ctx.cfg.split_ratio, ctx.cfg.seed);
    Table train = features.take_rows(train_rows);
    Table test = features.take_rows(test_rows);

    const ScalerParams scaler = standardize_fit(train, predictors);
    standardize_apply(scaler, train);
    standardize_apply(scaler, test);

    const Matrix x_train = train.to_matrix(predictors);
    const std::vector<double>& y_train = train.col("area_next");

    // full elimination ranking; nested selections reconstruct any count
    const RfeResult ranking = rfe(x_train, y_train, 1);
    std::vector<std::size_t> elimination = ranking.elimination_order;
    elimination.push_back(ranking.selected[0]);
    std::vector<std::size_t> selected;
    {
        std::vector<bool> kill(predictors.size(), false);
        for (std::size_t i = 0;
             i + ctx.cfg.rfe_count < predictors.size() && i < elimination.size();
             ++i) {
            kill[elimination[i]] = true;
        }
        for (std::size_t i = 0; i < predictors.size(); ++i) {
            if (!kill[i]) selected.push_back(i);
        }
    }
    {
        CsvWriter w({"order", "feature"});
        for (std::size_t i = 0; i < elimination.size(); ++i) {
            w.field(static_cast<long>(i));
            w.field(predictors[elimination[i]]);
            w.end_row();
        }
        ctx.write_artifact(entry, "rfe_ranking.csv", w.str());
    }

    const PcaModel pca = pca_fit(x_train);
    const std::size_t k = pca_select(pca, ctx.cfg.pca_variance_threshold);
    {
        CsvWriter w({"component", "eigenvalue", "explained_ratio", "cumulative"});
        double cum = 0.0;
        for (std::size_t i = 0; i < pca.eigenvalues.size(); ++i) {
            cum += pca.explained_ratio[i];
            w.field(static_cast<long>(i + 1));
            w.field(pca.eigenvalues[i]);
            w.field(pca.explained_ratio[i]);
            w.field(cum);
            w.end_row();
        }
        ctx.write_artifact(entry, "pca_scree.csv", w.str());
        SvgSeries scree{"explained ratio", {}, {}};
        for (std::size_t i = 0; i < pca.explained_ratio.size(); ++i) {
            scree.x.push_back(static_cast<double>(i + 1));
            scree.y.push_back(pca.explained_ratio[i]);
        }
        ctx.write_artifact(entry, "pca_scree.svg",
                           svg_line_chart({scree}, "pca scree", "component",
                                          "explained variance ratio"));
    }

    // k-means elbow over the standardized predictors
    {
        std::vector<double> inertias;
        const std::size_t max_k =
            std::min<std::size_t>(ctx.cfg.kmeans_max_k, x_train.rows());
        for (std::size_t kk = 1; kk <= max_k; ++kk) {
            inertias.push_back(kmeans(x_train, kk, ctx.cfg.seed).inertia);
        }
        const std::size_t k_star = elbow(inertias, 1);
        const KmeansResult clusters = kmeans(x_train, k_star, ctx.cfg.seed);
        CsvWriter w({"k", "inertia"});
        for (std::size_t i = 0; i < inertias.size(); ++i) {
            w.field(static_cast<long>(i + 1));
            w.field(inertias[i]);
            w.end_row();
        }
        ctx.write_artifact(entry, "kmeans_inertia.csv", w.str());
        SvgSeries curve{"inertia", {}, {}};
        for (std::size_t i = 0; i < inertias.size(); ++i) {
            curve.x.push_back(static_cast<double>(i + 1));
            curve.y.push_back(inertias[i]);
        }
        ctx.write_artifact(entry, "kmeans_elbow.svg",
                           svg_line_chart({curve}, "k-means elbow", "k", "inertia"));
        CsvWriter labels({"cell_id", "year", "cluster"});
        for (std::size_t i = 0; i < train.n_rows(); ++i) {
            labels.field(static_cast<long>(train.col("cell_id")[i]));
            labels.field(static_cast<int>(train.col("year")[i]));
            labels.field(clusters.labels[i]);
            labels.end_row();
        }
        ctx.write_artifact(entry, "kmeans_clusters.csv", labels.str());

        json model_doc;
        model_doc["magic"] = "coastcast-features";
        model_doc["schema_version"] = 1;
        model_doc["predictors"] = predictors;
        model_doc["scaler"] = {{"columns", scaler.columns},
                               {"mean", scaler.mean},
                               {"std", scaler.stddev}};
        model_doc["rfe_elimination_order"] = elimination;
        model_doc["rfe_selected"] = selected;
        std::vector<std::vector<double>> comp(pca.components.rows());
        for (std::size_t i = 0; i < pca.components.rows(); ++i) {
            for (std::size_t j = 0; j < pca.components.cols(); ++j) {
                comp[i].push_back(pca.components(i, j));
            }
        }
        model_doc["pca"] = {{"means", pca.means},
                            {"components", comp},
                            {"eigenvalues", pca.eigenvalues},
                            {"ratios", pca.explained_ratio},
                            {"k", k}};
        model_doc["kmeans"] = {{"k_star", k_star}};
        ctx.write_artifact(entry, "features_model.json", model_doc.dump(2) + "\n");
    }

    ctx.write_artifact(entry, "features_train.csv", train.to_csv());
    ctx.write_artifact(entry, "features_test.csv", test.to_csv());
    ctx.manifest.record_stage("features", std::move(entry));
    std::cout << "features: train " << train.n_rows() << " rows, test "
              << test.n_rows() << " rows, pca k=" << k << "\n";
}

void cmd_train(StageContext& ctx) {
    StageEntry entry;
    FeatureBundle fb = load_feature_bundle(ctx, entry);

    const Matrix x_scaled = fb.train.to_matrix(fb.predictors);
    const std::vector<double>& y = fb.train.col("area_next");
    const Matrix x_rfe = select_matrix_columns(x_scaled, fb.rfe_selected);
    const Matrix x_pca = pca_transform(fb.pca, x_scaled, fb.pca_k);

    // the SVR path searches its hyperparameters first, on a train subsample
    SvrHyperParams best_svr;
    const bool wants_svr =
        std::find(ctx.cfg.models.begin(), ctx.cfg.models.end(), "svr") !=
        ctx.cfg.models.end();
    Matrix x_svr;
    std::vector<double> y_svr;
    if (wants_svr) {
        subsample_rows(x_scaled, y, ctx.cfg.svr_subsample, ctx.cfg.seed, x_svr, y_svr);
        const SvrGridResult grid_result = grid_search_svr(
            x_svr, y_svr, ctx.cfg.svr_grid, ctx.cfg.svr_cv_folds, ctx.cfg.seed);
        best_svr = grid_result.best;
        CsvWriter w({"c", "gamma", "epsilon", "kernel", "mean_r2", "converged"});
        for (const auto& cell : grid_result.cells) {
            w.field(cell.params.c);
            w.field(cell.params.gamma);
            w.field(cell.params.epsilon);
            w.field(std::string_view(svr_kernel_name(cell.params.kernel)));
            w.field(cell.mean_r2);
            w.field(std::string_view(cell.converged ? "true" : "false"));
            w.end_row();
        }
        ctx.write_artifact(entry, "svr_grid.csv", w.str());
    }

    CsvWriter summary({"model", "input_variant", "mean_mse", "mean_mae",
                       "mean_r2", "std_r2", "failed_folds"});
    for (const std::string& kind : ctx.cfg.models) {
        const ModelSpec spec = spec_for(ctx.cfg, kind, best_svr);
        struct Variant {
            std::string name;
            const Matrix* x;
            std::span<const double> y;
        };
        Matrix x_rfe_svr, x_pca_svr;
        std::vector<Variant> variants;
        if (spec.kind == ModelKind::svr) {
            // kernel matrices need the same subsample across variants
            x_rfe_svr = select_matrix_columns(x_svr, fb.rfe_selected);
            x_pca_svr = pca_transform(fb.pca, x_svr, fb.pca_k);
            variants = {{"scaled", &x_svr, y_svr},
                        {"rfe(" + std::to_string(ctx.cfg.rfe_count) + ")",
                         &x_rfe_svr, y_svr},
                        {"pca(" + std::to_string(fb.pca_k) + ")", &x_pca_svr, y_svr}};
        } else {
            variants = {{"scaled", &x_scaled, y},
                        {"rfe(" + std::to_string(ctx.cfg.rfe_count) + ")", &x_rfe, y},
                        {"pca(" + std::to_string(fb.pca_k) + ")", &x_pca, y}};
        }

        for (const Variant& variant : variants) {
            ScoreReport report = repeated_kfold(spec, *variant.x, variant.y,
                                                ctx.cfg.cv_splits,
                                                ctx.cfg.cv_repeats, ctx.cfg.seed);
            report.input_variant = variant.name;
            ctx.write_artifact(entry,
                               "scores_" + kind + "_" +
                                   variant_file_tag(variant.name) + ".csv",
                               score_report_csv(report, ctx.cfg.cv_splits));
            summary.field(kind);
            summary.field(variant.name);
            summary.field(report.mean_mse());
            summary.field(report.mean_mae());
            summary.field(report.mean_r2());
            summary.field(report.std_r2());
            summary.field(static_cast<long>(report.failed_folds));
            summary.end_row();
        }

        // learning curve + final fit on the scaled variant
        const Matrix& x_fit = spec.kind == ModelKind::svr ? x_svr : x_scaled;
        const std::span<const double> y_fit =
            spec.kind == ModelKind::svr ? std::span<const double>(y_svr)
                                        : std::span<const double>(y);
        const auto curve = learning_curve(spec, x_fit, y_fit,
                                          ctx.cfg.learning_curve_fractions,
                                          ctx.cfg.seed);
        {
            CsvWriter w({"fraction", "n_train", "train_r2", "val_r2"});
            SvgSeries train_series{"train", {}, {}};
            SvgSeries val_series{"validation", {}, {}};
            for (const auto& p : curve) {
                w.field(p.fraction);
                w.field(static_cast<long>(p.n_train));
                w.field(p.train_r2);
                w.field(p.val_r2);
                w.end_row();
                train_series.x.push_back(static_cast<double>(p.n_train));
                train_series.y.push_back(p.train_r2);
                val_series.x.push_back(static_cast<double>(p.n_train));
                val_series.y.push_back(p.val_r2);
            }
            ctx.write_artifact(entry, "learning_curve_" + kind + ".csv", w.str());
            ctx.write_artifact(entry, "learning_curve_" + kind + ".svg",
                               svg_line_chart({train_series, val_series},
                                              kind + " learning curve",
                                              "training rows", "R^2"));
        }
        try {
            const auto final_model = fit_model(spec, x_fit, y_fit);
            ctx.write_artifact(entry, "models/" + kind + "_scaled.model.json",
                               serialize_model(*final_model));
        } catch (const Error& e) {
            if (e.code() != errc::no_convergence) throw;
            std::cout << "train: " << kind
                      << " final fit exhausted its pass budget; no artifact ("
                      << e.what() << ")\n";
        }
    }
    ctx.write_artifact(entry, "scores_summary.csv", summary.str());
    ctx.manifest.record_stage("train", std::move(entry));
    std::cout << "train: " << ctx.cfg.models.size() << " models x 3 variants\n";
}

void cmd_compare(StageContext& ctx) {
    StageEntry entry;
    FeatureBundle fb = load_feature_bundle(ctx, entry);

    std::vector<ScoreReport> reports;
    for (const std::string& kind : ctx.cfg.models) {
        reports.push_back(score_report_from_csv(
            ctx.read_artifact(entry, "scores_" + kind + "_scaled.csv")));
    }

    // rfe-count sweep for the best-mean model, same folds as cmd_train
    const ScoreReport* best = &reports[0];
    for (const auto& r : reports) {
        if (r.mean_r2() > best->mean_r2()) best = &r;
    }
    const std::string best_kind = best->model;

    SvrHyperParams svr_params;
    if (best_kind == "svr") {
        // reuse the searched parameters recorded by cmd_train
        const CsvDoc doc =
            read_csv(ctx.read_artifact(entry, "svr_grid.csv"));
        double best_r2 = -1e300;
        for (const auto& row : doc.rows) {
            const double r2 = parse_double(row[4], 0);
            if (r2 > best_r2) {
                best_r2 = r2;
                svr_params.c = parse_double(row[0], 0);
                svr_params.gamma = parse_double(row[1], 0);
                svr_params.epsilon = parse_double(row[2], 0);
                svr_params.kernel = svr_kernel_from_name(row[3]);
            }
        }
    }
    const ModelSpec spec = spec_for(ctx.cfg, best_kind, svr_params);

    const Matrix x_scaled = fb.train.to_matrix(fb.predictors);
    const std::vector<double>& y_full = fb.train.col("area_next");
    Matrix x_base;
    std::vector<double> y_base;
    if (best_kind == "svr") {
        subsample_rows(x_scaled, y_full, ctx.cfg.svr_subsample, ctx.cfg.seed,
                       x_base, y_base);
    } else {
        x_base = x_scaled;
        y_base = y_full;
    }

    for (std::size_t n : ctx.cfg.rfe_counts) {
        if (n > fb.predictors.size()) continue;
        const auto cols = rfe_selection_for(fb, n);
        const Matrix x_n = select_matrix_columns(x_base, cols);
        ScoreReport report = repeated_kfold(spec, x_n, y_base, ctx.cfg.cv_splits,
                                            ctx.cfg.cv_repeats, ctx.cfg.seed);
        report.input_variant = "rfe(" + std::to_string(n) + ")";
        ctx.write_artifact(entry,
                           "scores_" + best_kind + "_" +
                               variant_file_tag(report.input_variant) + ".csv",
                           score_report_csv(report, ctx.cfg.cv_splits));
        reports.push_back(std::move(report));
    }

    const ModelComparison cmp = compare_models(reports, ctx.cfg.alpha);
    ctx.write_artifact(entry, "compare.csv", cmp.to_csv());
    ctx.write_artifact(entry, "compare.txt", cmp.to_text());
    ctx.manifest.record_stage("compare", std::move(entry));
    std::cout << cmp.to_text();
}

void cmd_shap(StageContext& ctx) {
    StageEntry entry;
    FeatureBundle fb = load_feature_bundle(ctx, entry);
    const auto model = deserialize_model(ctx.read_artifact(
        entry, "models/" + ctx.cfg.shap_model + "_scaled.model.json"));

    const Matrix x = fb.train.to_matrix(fb.predictors);
    Rng rng = Rng(ctx.cfg.seed).fork(0x5a9);
    auto perm = rng.permutation(x.rows());
    const std::size_t n_rows = std::min(ctx.cfg.shap_rows, x.rows() / 2);
    const std::size_t n_bg = std::min(ctx.cfg.shap_background, x.rows() - n_rows);

    Matrix background(n_bg, x.cols());
    for (std::size_t i = 0; i < n_bg; ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            background(i, j) = x(perm[n_rows + i], j);
        }
    }

    const std::size_t d = fb.predictors.size();
    std::vector<double> mean_abs_phi(d, 0.0);
    CsvWriter values({"row", "cell_id", "year", "feature", "value", "phi"});
    std::vector<std::vector<double>> phis(n_rows);
    std::vector<std::vector<double>> vals(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::size_t row = perm[r];
        const ShapleyResult res = shapley_exact(*model, x.row(row), background);
        phis[r] = res.phi;
        vals[r].assign(x.row(row).begin(), x.row(row).end());
        for (std::size_t j = 0; j < d; ++j) {
            mean_abs_phi[j] += std::fabs(res.phi[j]);
            values.field(static_cast<long>(row));
            values.field(static_cast<long>(fb.train.col("cell_id")[row]));
            values.field(static_cast<int>(fb.train.col("year")[row]));
            values.field(fb.predictors[j]);
            values.field(x(row, j));
            values.field(res.phi[j]);
            values.end_row();
        }
    }
    for (double& v : mean_abs_phi) v /= static_cast<double>(n_rows);

    ctx.write_artifact(entry, "shap_summary.csv", values.str());
    {
        CsvWriter w({"feature", "mean_abs_phi"});
        for (std::size_t j = 0; j < d; ++j) {
            w.field(fb.predictors[j]);
            w.field(mean_abs_phi[j]);
            w.end_row();
        }
        ctx.write_artifact(entry, "shap_bar.csv", w.str());
        ctx.write_artifact(entry, "shap_bar.svg",
                           svg_bar_chart(fb.predictors, mean_abs_phi,
                                         "mean |phi| per feature"));
    }
    {
        // summary beeswarm stand-in: phi vs feature index
        std::vector<double> xs, ys;
        for (std::size_t r = 0; r < n_rows; ++r) {
            for (std::size_t j = 0; j < d; ++j) {
                xs.push_back(phis[r][j]);
                ys.push_back(static_cast<double>(j));
            }
        }
        ctx.write_artifact(entry, "shap_summary.svg",
                           svg_scatter(xs, ys, "shap summary", "phi",
                                       "feature index"));
    }

    // dependence data: the interaction column is the feature whose values
    // correlate most with this feature's attributions
    for (const char* target_name : {"salinity", "area"}) {
        const std::string target(target_name);
        auto it = std::find(fb.predictors.begin(), fb.predictors.end(), target);
        if (it == fb.predictors.end()) continue;
        const std::size_t tj = static_cast<std::size_t>(it - fb.predictors.begin());
        std::vector<double> phi_t(n_rows), val_t(n_rows);
        for (std::size_t r = 0; r < n_rows; ++r) {
            phi_t[r] = phis[r][tj];
            val_t[r] = vals[r][tj];
        }
        std::size_t best_j = tj;
        double best_corr = -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (j == tj) continue;
            std::vector<double> vj(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) vj[r] = vals[r][j];
            Table t;
            t.columns = {"a", "b"};
            t.data = {phi_t, vj};
            const double c = std::fabs(correlation_matrix(t).matrix(0, 1));
            if (c > best_corr) {
                best_corr = c;
                best_j = j;
            }
        }
        CsvWriter w({"value", "phi", "interaction_feature", "interaction_value"});
        for (std::size_t r = 0; r < n_rows; ++r) {
            w.field(val_t[r]);
            w.field(phi_t[r]);
            w.field(fb.predictors[best_j]);
            w.field(vals[r][best_j]);
            w.end_row();
        }
        ctx.write_artifact(entry, "shap_dependence_" + target + ".csv", w.str());
        ctx.write_artifact(entry, "shap_dependence_" + target + ".svg",
                           svg_scatter(val_t, phi_t, "dependence: " + target,
                                       target + " (standardized)", "phi"));
    }
    ctx.manifest.record_stage("shap", std::move(entry));
    std::cout << "shap: " << n_rows << " rows explained against " << n_bg
              << " background rows\n";
}

void cmd_cqr(StageContext& ctx) {
    StageEntry entry;
    FeatureBundle fb = load_feature_bundle(ctx, entry);

    const Matrix x_train = fb.train.to_matrix(fb.predictors);
    const std::vector<double>& y_train = fb.train.col("area_next");
    const Matrix x_test = fb.test.to_matrix(fb.predictors);
    const std::vector<double>& y_test = fb.test.col("area_next");

    Rng rng = Rng(ctx.cfg.seed).fork(0xc02);
    auto perm = rng.permutation(x_train.rows());
    const std::size_t n_cal = std::max<std::size_t>(
        10, static_cast<std::size_t>(std::llround(
                ctx.cfg.cqr_calibration_ratio *
                static_cast<double>(x_train.rows()))));
    const std::size_t n_proper = x_train.rows() - n_cal;

    Matrix x_proper(n_proper, x_train.cols()), x_cal(n_cal, x_train.cols());
    std::vector<double> y_proper(n_proper), y_cal(n_cal);
    for (std::size_t i = 0; i < n_proper; ++i) {
        for (std::size_t j = 0; j < x_train.cols(); ++j) {
            x_proper(i, j) = x_train(perm[i], j);
        }
        y_proper[i] = y_train[perm[i]];
    }
    for (std::size_t i = 0; i < n_cal; ++i) {
        for (std::size_t j = 0; j < x_train.cols(); ++j) {
            x_cal(i, j) = x_train(perm[n_proper + i], j);
        }
        y_cal[i] = y_train[perm[n_proper + i]];
    }

    const double tau_lo = ctx.cfg.cqr_alpha / 2.0;
    const QuantileGbtModel q_lo =
        fit_quantile_gbt(x_proper, y_proper, tau_lo, ctx.cfg.gbt);
    const QuantileGbtModel q_hi =
        fit_quantile_gbt(x_proper, y_proper, 1.0 - tau_lo, ctx.cfg.gbt);
    const double q = cqr_calibrate(q_lo, q_hi, x_cal, y_cal, ctx.cfg.cqr_alpha);
    const PredictionIntervals iv =
        cqr_intervals(q_lo, q_hi, x_test, q, ctx.cfg.cqr_alpha);
    const double cov = coverage(iv, y_test);

    CsvWriter w({"cell_id", "year", "area_next", "lower", "upper", "covered"});
    double width = 0.0;
    for (std::size_t i = 0; i < y_test.size(); ++i) {
        w.field(static_cast<long>(fb.test.col("cell_id")[i]));
        w.field(static_cast<int>(fb.test.col("year")[i]));
        w.field(y_test[i]);
        w.field(iv.lower[i]);
        w.field(iv.upper[i]);
        w.field(std::string_view(
            iv.lower[i] <= y_test[i] && y_test[i] <= iv.upper[i] ? "true"
                                                                 : "false"));
        w.end_row();
        width += iv.upper[i] - iv.lower[i];
    }
    ctx.write_artifact(entry, "intervals.csv", w.str());
    {
        CsvWriter s({"alpha", "offset_q", "coverage", "mean_width", "rows"});
        s.field(ctx.cfg.cqr_alpha);
        s.field(q);
        s.field(cov);
        s.field(width / static_cast<double>(y_test.size()));
        s.field(static_cast<long>(y_test.size()));
        s.end_row();
        ctx.write_artifact(entry, "cqr_summary.csv", s.str());
    }
    ctx.manifest.record_stage("cqr", std::move(entry));
    std::cout << "cqr: coverage " << cov << " at alpha " << ctx.cfg.cqr_alpha
              << "\n";
}

void cmd_forecast(StageContext& ctx) {
    StageEntry entry;
    FeatureBundle fb = load_feature_bundle(ctx, entry);
    const Panel panel = panel_from_csv(ctx.read_artifact(entry, "panel.csv"), {});

    std::string model_kind = ctx.cfg.forecast_model;
    if (model_kind == "best") {
        const CsvDoc doc = read_csv(ctx.read_artifact(entry, "scores_summary.csv"));
        double best = -1e300;
        for (const auto& row : doc.rows) {
            if (row[1] != "scaled") continue;
            const double r2 = parse_double(row[4], 0);
            if (r2 > best) {
                best = r2;
                model_kind = row[0];
            }
        }
        if (model_kind == "best") {
            raise(errc::missing_artifact, "scores_summary.csv has no scaled rows");
        }
    }
    const auto model = deserialize_model(
        ctx.read_artifact(entry, "models/" + model_kind + "_scaled.model.json"));

    int final_year = panel.rows.empty() ? 0 : panel.rows.front().year;
    for (const auto& r : panel.rows) final_year = std::max(final_year, r.year);

    std::vector<const CellYearRecord*> rows;
    for (const auto& r : panel.rows) {
        if (r.year == final_year) rows.push_back(&r);
    }
    if (rows.empty()) raise(errc::missing_artifact, "panel has no rows");

    // assemble the final-year features exactly like the supervised path
    SupervisedTable final_rows;
    for (const auto* r : rows) {
        SupervisedRow s;
        s.cell_id = r->cell_id;
        s.year = r->year;
        s.lat_center = (r->top + r->bottom) / 2.0;
        s.lon_center = (r->left + r->right) / 2.0;
        s.area = r->area;
        s.perimeter = r->perimeter;
        s.area_next = 0.0;
        final_rows.rows.push_back(s);
    }

    std::map<int, EcvGrid> grids;
    for (const YearPath& yp : ctx.cfg.ecv) {
        if (yp.year != final_year) continue;
        FillResult filled =
            fill_missing_nearest(load_ecv_csv(ctx.read_input(entry, yp.path)));
        grids.emplace(yp.year, std::move(filled.grid));
    }
    if (!grids.count(final_year)) {
        raise(errc::missing_artifact,
              "no ecv input for the final year " + std::to_string(final_year));
    }

    Table features = join_cells(final_rows, grids);
    scale_columns(features, {"area", "perimeter"}, ctx.cfg.scale_factor);
    standardize_apply(fb.scaler, features);

    const Matrix x = features.to_matrix(fb.predictors);
    std::vector<double> current_scaled;
    for (const auto* r : rows) current_scaled.push_back(r->area * ctx.cfg.scale_factor);

    const ForecastResult result = forecast_next_year(*model, x, current_scaled);

    CsvWriter w({"cell_id", "lon_center", "lat_center", "area_deg2",
                 "predicted_next_deg2", "change_deg2", "negative"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double predicted = result.predicted[i] / ctx.cfg.scale_factor;
        w.field(rows[i]->cell_id);
        w.field(final_rows.rows[i].lon_center);
        w.field(final_rows.rows[i].lat_center);
        w.field(rows[i]->area);
        w.field(predicted);
        w.field(result.change[i] / ctx.cfg.scale_factor);
        w.field(std::string_view(predicted < 0.0 ? "true" : "false"));
        w.end_row();
    }
    ctx.write_artifact(entry, "forecast.csv", w.str());
    {
        const double mean_change_deg2 = result.mean_change / ctx.cfg.scale_factor;
        CsvWriter s({"model", "from_year", "to_year", "rows",
                     "mean_change_deg2", "negative_predictions"});
        s.field(model_kind);
        s.field(final_year);
        s.field(final_year + 1);
        s.field(static_cast<long>(rows.size()));
        s.field(mean_change_deg2);
        s.field(static_cast<long>(result.negative_count));
        s.end_row();
        ctx.write_artifact(entry, "forecast_summary.csv", s.str());
        std::cout << "forecast: year " << final_year + 1 << ", mean change "
                  << format_double(mean_change_deg2) << " deg^2, "
                  << result.negative_count << " negative cells\n";
    }
    ctx.manifest.record_stage("forecast", std::move(entry));
}

} // namespace pipeline
