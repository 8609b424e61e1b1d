#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace pipeline {

std::uint64_t fnv1a64(std::string_view bytes);
std::string checksum_hex(std::string_view bytes);
std::string checksum_file(const std::string& path);

struct StageEntry {
    std::map<std::string, std::string> inputs;  // path (relative) -> checksum
    std::map<std::string, std::string> outputs;
};

// Deterministic run record: config hash, tool version, per-stage artifact
// checksums. No timestamps; identical runs produce identical bytes.
class Manifest {
public:
    Manifest(std::string out_dir, std::string config_hash);

    // loads an existing manifest.json when present and compatible
    void load_existing();

    void record_stage(const std::string& stage, StageEntry entry);
    bool has_stage(const std::string& stage) const;

    // checksum recorded by whichever stage produced this artifact, if any
    std::string recorded_output(const std::string& rel) const;

    void save() const;

    static constexpr const char* kToolVersion = "1.0.0";

private:
    std::string out_dir_;
    std::string config_hash_;
    std::map<std::string, StageEntry> stages_;
};

// Advisory lock: two processes must not share an output directory.
class OutputLock {
public:
    explicit OutputLock(const std::string& out_dir);
    ~OutputLock();

    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::string path_;
    bool held_ = false;
};

} // namespace pipeline
