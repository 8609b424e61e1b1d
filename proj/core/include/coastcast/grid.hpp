#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coastcast/geometry.hpp"

namespace coastcast {

// Analysis-grid defaults: the study bounds, and square cells of side
// 100 km at ~111 km per degree.
inline constexpr std::array<double, 4> kDefaultBounds = {
    -175.339555556, 179.979555556, -38.856666667, 33.799333333}; // min_lon, max_lon, min_lat, max_lat
inline constexpr double kDefaultCellSide = 0.900901;

struct GridSpec {
    double min_lon = 0.0, max_lon = 0.0;
    double min_lat = 0.0, max_lat = 0.0;
    double cell_side = 0.0;
    std::size_t n_cols = 0;
    std::size_t n_rows = 0;

    std::size_t cell_count() const { return n_cols * n_rows; }
};

struct Cell {
    long cell_id = 0;
    double left = 0.0, right = 0.0, top = 0.0, bottom = 0.0;
};

// Row-major tiling from (min_lon, min_lat); the last column/row is clamped
// so the cells tile the bounds exactly. Throws degenerate_bounds.
GridSpec generate_grid(double min_lon, double max_lon, double min_lat,
                       double max_lat, double cell_side);

Cell cell_at(const GridSpec& grid, std::size_t row, std::size_t col);
Cell cell_by_id(const GridSpec& grid, long cell_id);

// Sutherland-Hodgman clip of every ring against the cell rectangle.
// Hole rings are clipped independently; containment survives because the
// window is convex. Returns nullopt when nothing of the outer ring remains.
std::optional<Polygon> clip_polygon_to_rect(const Polygon& poly, const Cell& rect);

struct CellYearRecord {
    long cell_id = 0;
    int year = 0;
    double left = 0.0, top = 0.0, bottom = 0.0, right = 0.0;
    double area = 0.0;      // deg^2
    double perimeter = 0.0; // degrees, post-clip boundary included
};

// Per-cell area/perimeter aggregation of a polygon layer. Candidate cells
// come from a bbox-to-grid index, never an all-pairs scan. The reduction
// order is fixed (polygon index, then cell) so results are bit-identical
// for any thread count. Output sorted by cell_id.
std::vector<CellYearRecord> intersect_layer(const VectorLayer& layer,
                                            const GridSpec& grid,
                                            std::size_t threads = 1);

std::string records_to_csv(const std::vector<CellYearRecord>& records);
std::vector<CellYearRecord> records_from_csv(std::string_view text);

} // namespace coastcast
