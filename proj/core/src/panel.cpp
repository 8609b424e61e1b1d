#include "coastcast/panel.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

namespace {

struct CellBounds {
    double left, top, bottom, right;
    bool operator==(const CellBounds&) const = default;
};

} // namespace

Panel align_cells(const std::vector<std::vector<CellYearRecord>>& yearly) {
    std::set<int> years;
    std::map<long, CellBounds> bounds;
    std::map<std::pair<long, int>, const CellYearRecord*> present;

    for (const auto& records : yearly) {
        for (const CellYearRecord& r : records) {
            years.insert(r.year);
            const CellBounds b{r.left, r.top, r.bottom, r.right};
            auto [it, inserted] = bounds.try_emplace(r.cell_id, b);
            if (!inserted && !(it->second == b)) {
                raise(errc::conflicting_cell_bounds,
                      "cell " + std::to_string(r.cell_id) +
                          " has different bounds across inputs");
            }
            present[{r.cell_id, r.year}] = &r;
        }
    }

    Panel panel;
    panel.observed_years.assign(years.begin(), years.end());
    panel.rows.reserve(bounds.size() * years.size());
    for (const auto& [cell_id, b] : bounds) {
        for (int year : panel.observed_years) {
            auto it = present.find({cell_id, year});
            if (it != present.end()) {
                panel.rows.push_back(*it->second);
            } else {
                CellYearRecord r;
                r.cell_id = cell_id;
                r.year = year;
                r.left = b.left;
                r.top = b.top;
                r.bottom = b.bottom;
                r.right = b.right;
                r.area = 0.0;
                r.perimeter = 0.0;
                panel.rows.push_back(r);
            }
        }
    }
    return panel;
}

Panel interpolate_years(const Panel& panel) {
    if (panel.observed_years.size() < 2) {
        raise(errc::single_observed_year,
              "need at least two observed years to interpolate");
    }
    Panel out;
    out.observed_years = panel.observed_years;

    std::map<long, std::map<int, const CellYearRecord*>> by_cell;
    for (const CellYearRecord& r : panel.rows) by_cell[r.cell_id][r.year] = &r;

    for (const auto& [cell_id, series] : by_cell) {
        for (std::size_t k = 0; k + 1 < panel.observed_years.size(); ++k) {
            const int y0 = panel.observed_years[k];
            const int y1 = panel.observed_years[k + 1];
            auto it0 = series.find(y0);
            auto it1 = series.find(y1);
            if (it0 == series.end() || it1 == series.end()) {
                raise(errc::bad_argument,
                      "panel missing observed year for cell " + std::to_string(cell_id));
            }
            const CellYearRecord& a = *it0->second;
            const CellYearRecord& b = *it1->second;
            out.rows.push_back(a);
            for (int y = y0 + 1; y < y1; ++y) {
                CellYearRecord r = a;
                r.year = y;
                const double t = static_cast<double>(y - y0) / static_cast<double>(y1 - y0);
                r.area = a.area + t * (b.area - a.area);
                r.perimeter = a.perimeter + t * (b.perimeter - a.perimeter);
                out.rows.push_back(r);
            }
        }
        out.rows.push_back(*series.at(panel.observed_years.back()));
    }
    return out;
}

SupervisedTable build_supervised(const Panel& panel) {
    std::map<std::pair<long, int>, const CellYearRecord*> index;
    for (const CellYearRecord& r : panel.rows) index[{r.cell_id, r.year}] = &r;

    SupervisedTable table;
    table.rows.reserve(panel.rows.size());
    for (const CellYearRecord& r : panel.rows) {
        auto next = index.find({r.cell_id, r.year + 1});
        if (next == index.end()) continue; // final year has no target
        SupervisedRow row;
        row.cell_id = r.cell_id;
        row.year = r.year;
        row.lat_center = (r.top + r.bottom) / 2.0;
        row.lon_center = (r.left + r.right) / 2.0;
        row.area = r.area;
        row.perimeter = r.perimeter;
        row.area_next = next->second->area;
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const SupervisedRow& a, const SupervisedRow& b) {
                  return a.cell_id != b.cell_id ? a.cell_id < b.cell_id
                                                : a.year < b.year;
              });
    return table;
}

std::string panel_to_csv(const Panel& panel) { return records_to_csv(panel.rows); }

Panel panel_from_csv(std::string_view text, std::vector<int> observed_years) {
    Panel p;
    p.rows = records_from_csv(text);
    p.observed_years = std::move(observed_years);
    return p;
}

std::string supervised_to_csv(const SupervisedTable& table) {
    CsvWriter w({"cell_id", "year", "lat_center", "lon_center", "area",
                 "perimeter", "area_next"});
    for (const SupervisedRow& r : table.rows) {
        w.field(r.cell_id);
        w.field(r.year);
        w.field(r.lat_center);
        w.field(r.lon_center);
        w.field(r.area);
        w.field(r.perimeter);
        w.field(r.area_next);
        w.end_row();
    }
    return w.str();
}

SupervisedTable supervised_from_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text);
    const std::vector<std::string> expect = {
        "cell_id", "year", "lat_center", "lon_center", "area", "perimeter",
        "area_next"};
    if (doc.header != expect) {
        raise(errc::bad_argument, "unexpected supervised csv header");
    }
    SupervisedTable table;
    table.rows.reserve(doc.rows.size());
    std::size_t line = 1;
    for (const auto& row : doc.rows) {
        ++line;
        SupervisedRow r;
        r.cell_id = static_cast<long>(parse_double(row[0], line));
        r.year = static_cast<int>(parse_double(row[1], line));
        r.lat_center = parse_double(row[2], line);
        r.lon_center = parse_double(row[3], line);
        r.area = parse_double(row[4], line);
        r.perimeter = parse_double(row[5], line);
        r.area_next = parse_double(row[6], line);
        table.rows.push_back(r);
    }
    return table;
}

} // namespace coastcast
