#include "coastcast/error.hpp"

namespace coastcast {

const char* errc_name(errc code) noexcept {
    switch (code) {
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_shape_type: return "UnsupportedShapeType";
    case errc::truncated_record: return "TruncatedRecord";
    case errc::non_monotone_record_numbers: return "NonMonotoneRecordNumbers";
    case errc::malformed_record: return "MalformedRecord";
    case errc::wkt_syntax: return "SyntaxError";
    case errc::empty_ring: return "EmptyRing";
    case errc::all_rings_degenerate: return "AllRingsDegenerate";
    case errc::degenerate_bounds: return "DegenerateBounds";
    case errc::conflicting_cell_bounds: return "ConflictingCellBounds";
    case errc::single_observed_year: return "SingleObservedYear";
    case errc::duplicate_point: return "DuplicatePoint";
    case errc::ragged_row: return "RaggedRow";
    case errc::non_numeric: return "NonNumeric";
    case errc::mixed_years: return "MixedYears";
    case errc::all_missing_channel: return "AllMissingChannel";
    case errc::missing_year_grid: return "MissingYearGrid";
    case errc::missing_value: return "MissingValue";
    case errc::zero_variance_column: return "ZeroVarianceColumn";
    case errc::bad_argument: return "BadArgument";
    case errc::rank_deficient: return "RankDeficient";
    case errc::no_convergence: return "NoConvergence";
    case errc::calibration_too_small: return "CalibrationTooSmall";
    case errc::too_many_features: return "TooManyFeatures";
    case errc::domain_error: return "DomainError";
    case errc::degenerate_sample: return "DegenerateSample";
    case errc::degenerate_groups: return "DegenerateGroups";
    case errc::io_error: return "IoError";
    case errc::bad_config: return "BadConfig";
    case errc::missing_artifact: return "MissingArtifact";
    }
    return "UnknownError";
}

void raise(errc code, const std::string& what) {
    throw Error(code, std::string(errc_name(code)) + ": " + what);
}

} // namespace coastcast
