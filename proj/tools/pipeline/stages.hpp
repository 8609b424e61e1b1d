#pragma once

#include <string>

#include "config.hpp"
#include "manifest.hpp"

namespace pipeline {

struct StageContext {
    const RunConfig& cfg;
    Manifest& manifest;

    std::string out_path(const std::string& rel) const;

    // atomic write + output checksum
    void write_artifact(StageEntry& entry, const std::string& rel,
                        std::string_view content) const;

    // prior-stage artifact: must exist and match the recorded checksum
    std::string read_artifact(StageEntry& entry, const std::string& rel) const;

    // external input file (layer/ecv paths from the config)
    std::string read_input(StageEntry& entry, const std::string& abs_path) const;
};

void cmd_synth(StageContext& ctx);
void cmd_grid(StageContext& ctx);
void cmd_intersect(StageContext& ctx);
void cmd_panel(StageContext& ctx);
void cmd_join(StageContext& ctx);
void cmd_features(StageContext& ctx);
void cmd_train(StageContext& ctx);
void cmd_compare(StageContext& ctx);
void cmd_shap(StageContext& ctx);
void cmd_cqr(StageContext& ctx);
void cmd_forecast(StageContext& ctx);

} // namespace pipeline
