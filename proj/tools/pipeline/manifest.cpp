#include "manifest.hpp"

#include <cstdio>
#include <fcntl.h>
#include <filesystem>
#include <unistd.h>

#include <json.hpp>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace pipeline {

using coastcast::errc;
using coastcast::raise;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string checksum_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string checksum_file(const std::string& path) {
    return checksum_hex(coastcast::read_file(path));
}

Manifest::Manifest(std::string out_dir, std::string config_hash)
    : out_dir_(std::move(out_dir)), config_hash_(std::move(config_hash)) {}

void Manifest::load_existing() {
    const std::string path = out_dir_ + "/manifest.json";
    if (!std::filesystem::exists(path)) return;
    json doc;
    try {
        doc = json::parse(coastcast::read_file(path));
    } catch (const json::exception&) {
        return; // ignore a torn manifest; it will be rewritten
    }
    if (doc.value("magic", "") != "coastcast-manifest") return;
    if (doc.value("config_hash", "") != config_hash_) return; // new config, fresh run
    const json stages = doc.value("stages", json::object());
    for (const auto& [stage, entry] : stages.items()) {
        StageEntry se;
        const json inputs = entry.value("inputs", json::object());
        const json outputs = entry.value("outputs", json::object());
        for (const auto& [k, v] : inputs.items()) se.inputs[k] = v.get<std::string>();
        for (const auto& [k, v] : outputs.items()) se.outputs[k] = v.get<std::string>();
        stages_[stage] = std::move(se);
    }
}

void Manifest::record_stage(const std::string& stage, StageEntry entry) {
    stages_[stage] = std::move(entry);
    save();
}

bool Manifest::has_stage(const std::string& stage) const {
    return stages_.count(stage) > 0;
}

std::string Manifest::recorded_output(const std::string& rel) const {
    for (const auto& [name, entry] : stages_) {
        auto it = entry.outputs.find(rel);
        if (it != entry.outputs.end()) return it->second;
    }
    return {};
}

void Manifest::save() const {
    json doc;
    doc["magic"] = "coastcast-manifest";
    doc["schema_version"] = 1;
    doc["tool_version"] = kToolVersion;
    doc["config_hash"] = config_hash_;
    json stages = json::object();
    for (const auto& [name, entry] : stages_) {
        json inputs = json::object();
        for (const auto& [k, v] : entry.inputs) inputs[k] = v;
        json outputs = json::object();
        for (const auto& [k, v] : entry.outputs) outputs[k] = v;
        stages[name] = {{"inputs", inputs}, {"outputs", outputs}};
    }
    doc["stages"] = stages;
    coastcast::write_file_atomic(out_dir_ + "/manifest.json", doc.dump(2) + "\n");
}

OutputLock::OutputLock(const std::string& out_dir) : path_(out_dir + "/.lock") {
    std::filesystem::create_directories(out_dir);
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        raise(errc::bad_config,
              "output directory is locked by another run (" + path_ +
                  " exists); remove the stale lock if no pipeline is running");
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.data(), pid.size());
    ::close(fd);
    held_ = true;
}

OutputLock::~OutputLock() {
    if (held_) ::unlink(path_.c_str());
}

} // namespace pipeline
