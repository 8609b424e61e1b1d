#pragma once

#include <string_view>
#include <vector>

#include "coastcast/grid.hpp"

namespace coastcast {

// Complete (cell_id, year) panel. Rows are sorted by (cell_id, year) and
// cover every year in [observed_years.front(), observed_years.back()] once
// interpolate_years has run.
struct Panel {
    std::vector<CellYearRecord> rows;
    std::vector<int> observed_years; // sorted, unique
};

// Union of cell ids across the observed years; a cell absent from an
// observed year intersected no polygons, so it is zero-filled, not NaN.
// Throws conflicting_cell_bounds when one id carries two different boxes.
Panel align_cells(const std::vector<std::vector<CellYearRecord>>& yearly);

// Linear interpolation of area and perimeter for the years between observed
// ones. Observed rows are copied bit-exactly; no extrapolation.
Panel interpolate_years(const Panel& panel);

struct SupervisedRow {
    long cell_id = 0;
    int year = 0;
    double lat_center = 0.0;
    double lon_center = 0.0;
    double area = 0.0;
    double perimeter = 0.0;
    double area_next = 0.0;
};

struct SupervisedTable {
    std::vector<SupervisedRow> rows;
};

// Adds the lag target: area_next(cell, y) = area(cell, y+1); rows for the
// final year are dropped. Cell centers replace the redundant bounds.
SupervisedTable build_supervised(const Panel& panel);

std::string panel_to_csv(const Panel& panel);
Panel panel_from_csv(std::string_view text, std::vector<int> observed_years);

std::string supervised_to_csv(const SupervisedTable& table);
SupervisedTable supervised_from_csv(std::string_view text);

} // namespace coastcast
