#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "coastcast/panel.hpp"
#include "coastcast/table.hpp"

namespace coastcast {

inline constexpr std::size_t kEcvChannels = 6;

inline constexpr std::array<const char*, kEcvChannels> kEcvChannelNames = {
    "heat_content",           // 10^22 J
    "salinity",               // unitless
    "temperature",            // degrees C
    "thermosteric_sea_level", // mm
    "halosteric_sea_level",   // mm
    "total_steric",           // mm
};

// Yearly 1-degree raster of the six ocean variables with a known/missing
// mask per (point, channel). Point layout is lat-major: index = lat_idx *
// n_lon + lon_idx.
struct EcvGrid {
    int year = 0;
    std::vector<double> lat_centers; // sorted ascending
    std::vector<double> lon_centers; // sorted ascending
    std::array<std::vector<double>, kEcvChannels> values;
    std::array<std::vector<std::uint8_t>, kEcvChannels> known;

    std::size_t n_lat() const { return lat_centers.size(); }
    std::size_t n_lon() const { return lon_centers.size(); }
    std::size_t n_points() const { return n_lat() * n_lon(); }
    std::size_t point_index(std::size_t lat_idx, std::size_t lon_idx) const {
        return lat_idx * n_lon() + lon_idx;
    }
};

// CSV header: year,lat,lon,<six channel columns>. Empty field = missing.
// All rows must share one year; the lat/lon lattice is the cross product of
// the coordinates seen, with unlisted points fully missing.
EcvGrid load_ecv_csv(std::string_view text);

std::string ecv_to_csv(const EcvGrid& grid);

struct FillResult {
    EcvGrid grid;
    // Channels with zero known values stay missing and are reported here.
    std::vector<std::size_t> all_missing_channels;
};

// Every missing point inherits the value of the nearest known point of the
// same channel (squared degree distance, ties broken by smallest lat then
// smallest lon). Known values are preserved bit-exactly; idempotent.
FillResult fill_missing_nearest(const EcvGrid& grid);

// Left join: each supervised row gains the six values of the same-year grid
// point nearest to (lat_center, lon_center). Row count is preserved.
Table join_cells(const SupervisedTable& table, const std::map<int, EcvGrid>& grids);

} // namespace coastcast
