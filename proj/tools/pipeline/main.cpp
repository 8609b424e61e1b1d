#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"
#include "config.hpp"
#include "manifest.hpp"
#include "stages.hpp"

namespace {

using pipeline::CliOverrides;
using pipeline::Manifest;
using pipeline::OutputLock;
using pipeline::RunConfig;
using pipeline::StageContext;

constexpr int kExitConfig = 2;
constexpr int kExitMissingArtifact = 3;
constexpr int kExitNumeric = 4;

using StageFn = void (*)(StageContext&);

struct StageDef {
    const char* name;
    const char* description;
    StageFn fn;
};

const StageDef kStages[] = {
    {"synth", "generate the synthetic desk-scale dataset", pipeline::cmd_synth},
    {"grid", "emit the analysis grid", pipeline::cmd_grid},
    {"intersect", "clip polygon layers onto the grid", pipeline::cmd_intersect},
    {"panel", "align cells, interpolate years, build the lag target",
     pipeline::cmd_panel},
    {"join", "attach the nearest ocean-variable values", pipeline::cmd_join},
    {"features", "EDA, cleaning, scaling, split, RFE, PCA, k-means",
     pipeline::cmd_features},
    {"train", "fit and cross-validate the model suite", pipeline::cmd_train},
    {"compare", "hypothesis tests across models and feature counts",
     pipeline::cmd_compare},
    {"shap", "exact Shapley attributions for the chosen model",
     pipeline::cmd_shap},
    {"cqr", "conformalized quantile regression intervals", pipeline::cmd_cqr},
    {"forecast", "one-step-ahead area forecast", pipeline::cmd_forecast},
};

int run_stages(const std::string& config_path, const CliOverrides& overrides,
               const std::vector<const StageDef*>& stages) {
    const RunConfig cfg = pipeline::load_config(config_path, overrides);
    std::filesystem::create_directories(cfg.out_dir);
    OutputLock lock(cfg.out_dir);

    Manifest manifest(cfg.out_dir, pipeline::checksum_hex(cfg.canonical_json()));
    manifest.load_existing();

    std::string timings;
    for (const StageDef* stage : stages) {
        StageContext ctx{cfg, manifest};
        const auto start = std::chrono::steady_clock::now();
        stage->fn(ctx);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        timings += std::string(stage->name) + " " +
                   coastcast::format_double(seconds) + "s\n";
    }
    // timings live outside the manifest so reruns stay byte-identical
    std::ofstream(cfg.out_dir + "/timings.txt", std::ios::app) << timings;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coastcast pipeline: polygon layers -> grid panel -> "
                 "ocean-variable join -> models, tests, attributions, "
                 "intervals, forecast"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides overrides;
    std::vector<const StageDef*> selected;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (json)")
            ->required();
        sub->add_option("--seed", overrides.seed, "override the config seed");
        sub->add_option("--out", overrides.out_dir, "override the output directory");
        sub->add_option("--threads", overrides.threads,
                        "worker threads (fallback: PIPELINE_THREADS)");
    };

    for (const StageDef& stage : kStages) {
        CLI::App* sub = app.add_subcommand(stage.name, stage.description);
        add_common(sub);
        sub->callback([&selected, &stage] { selected.push_back(&stage); });
    }
    CLI::App* all = app.add_subcommand("all", "run every stage in order");
    add_common(all);
    all->callback([&] {
        for (const StageDef& stage : kStages) {
            if (std::string(stage.name) == "synth") continue; // added below if configured
            selected.push_back(&stage);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        (void)app.exit(e);
        return kExitConfig;
    }

    try {
        if (all->parsed()) {
            const RunConfig probe = pipeline::load_config(config_path, overrides);
            if (probe.has_synth) {
                selected.insert(selected.begin(), &kStages[0]);
            }
        }
        return run_stages(config_path, overrides, selected);
    } catch (const coastcast::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
        case coastcast::errc::bad_config:
        case coastcast::errc::io_error:
            return kExitConfig;
        case coastcast::errc::missing_artifact:
            return kExitMissingArtifact;
        default:
            return kExitNumeric;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
