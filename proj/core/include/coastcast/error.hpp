#pragma once

#include <stdexcept>
#include <string>

namespace coastcast {

// Typed failure reasons, one namespace-wide enum so callers can switch on
// the code without catching per-module exception types.
enum class errc {
    // vector ingest
    bad_magic,
    unsupported_shape_type,
    truncated_record,
    non_monotone_record_numbers,
    malformed_record,
    wkt_syntax,
    empty_ring,
    all_rings_degenerate,
    // grid engine
    degenerate_bounds,
    // temporal panel
    conflicting_cell_bounds,
    single_observed_year,
    // ecv join
    duplicate_point,
    ragged_row,
    non_numeric,
    mixed_years,
    all_missing_channel,
    missing_year_grid,
    missing_value,
    // feature lab
    zero_variance_column,
    bad_argument,
    // models
    rank_deficient,
    no_convergence,
    calibration_too_small,
    too_many_features,
    // stats
    domain_error,
    degenerate_sample,
    degenerate_groups,
    // io / orchestration
    io_error,
    bad_config,
    missing_artifact,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] void raise(errc code, const std::string& what);

} // namespace coastcast
