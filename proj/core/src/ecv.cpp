#include "coastcast/ecv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t coord_index(const std::vector<double>& sorted, double v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    return static_cast<std::size_t>(it - sorted.begin());
}

} // namespace

EcvGrid load_ecv_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text);
    std::vector<std::string> expect = {"year", "lat", "lon"};
    for (const char* name : kEcvChannelNames) expect.emplace_back(name);
    if (doc.header != expect) {
        raise(errc::bad_argument, "unexpected ecv csv header");
    }

    struct RawRow {
        double lat, lon;
        std::array<double, kEcvChannels> v;
        std::array<bool, kEcvChannels> k;
    };
    std::vector<RawRow> raw;
    raw.reserve(doc.rows.size());

    EcvGrid grid;
    bool have_year = false;
    std::set<double> lat_set, lon_set;
    std::size_t line = 1;
    for (const auto& row : doc.rows) {
        ++line;
        const int year = static_cast<int>(parse_double(row[0], line));
        if (!have_year) {
            grid.year = year;
            have_year = true;
        } else if (year != grid.year) {
            raise(errc::mixed_years, "row year " + std::to_string(year) +
                                         " differs from " + std::to_string(grid.year));
        }
        RawRow r;
        r.lat = parse_double(row[1], line);
        r.lon = parse_double(row[2], line);
        for (std::size_t c = 0; c < kEcvChannels; ++c) {
            const std::string& field = row[3 + c];
            if (field.empty()) {
                r.v[c] = kNaN;
                r.k[c] = false;
            } else {
                r.v[c] = parse_double(field, line);
                r.k[c] = true;
            }
        }
        lat_set.insert(r.lat);
        lon_set.insert(r.lon);
        raw.push_back(r);
    }

    grid.lat_centers.assign(lat_set.begin(), lat_set.end());
    grid.lon_centers.assign(lon_set.begin(), lon_set.end());
    const std::size_t n = grid.n_points();
    for (std::size_t c = 0; c < kEcvChannels; ++c) {
        grid.values[c].assign(n, kNaN);
        grid.known[c].assign(n, 0);
    }

    std::vector<std::uint8_t> seen(n, 0);
    for (const RawRow& r : raw) {
        const std::size_t idx =
            grid.point_index(coord_index(grid.lat_centers, r.lat),
                             coord_index(grid.lon_centers, r.lon));
        if (seen[idx]) {
            raise(errc::duplicate_point,
                  "duplicate point (" + format_double(r.lat) + ", " +
                      format_double(r.lon) + ")");
        }
        seen[idx] = 1;
        for (std::size_t c = 0; c < kEcvChannels; ++c) {
            grid.values[c][idx] = r.v[c];
            grid.known[c][idx] = r.k[c] ? 1 : 0;
        }
    }
    return grid;
}

std::string ecv_to_csv(const EcvGrid& grid) {
    std::vector<std::string> header = {"year", "lat", "lon"};
    for (const char* name : kEcvChannelNames) header.emplace_back(name);
    CsvWriter w(header);
    for (std::size_t i = 0; i < grid.n_lat(); ++i) {
        for (std::size_t j = 0; j < grid.n_lon(); ++j) {
            const std::size_t idx = grid.point_index(i, j);
            w.field(grid.year);
            w.field(grid.lat_centers[i]);
            w.field(grid.lon_centers[j]);
            for (std::size_t c = 0; c < kEcvChannels; ++c) {
                if (grid.known[c][idx]) {
                    w.field(grid.values[c][idx]);
                } else {
                    w.field(std::string_view{});
                }
            }
            w.end_row();
        }
    }
    return w.str();
}

namespace {

double min_axis_spacing(const std::vector<double>& coords) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
        m = std::min(m, coords[i + 1] - coords[i]);
    }
    return m;
}

struct Best {
    double d2 = std::numeric_limits<double>::infinity();
    double lat = 0.0, lon = 0.0;
    std::size_t idx = 0;
    bool found = false;

    // distance first, then smallest lat, then smallest lon
    void consider(double d2_cand, double lat_cand, double lon_cand, std::size_t i) {
        if (!found || d2_cand < d2 ||
            (d2_cand == d2 && (lat_cand < lat || (lat_cand == lat && lon_cand < lon)))) {
            d2 = d2_cand;
            lat = lat_cand;
            lon = lon_cand;
            idx = i;
            found = true;
        }
    }
};

} // namespace

FillResult fill_missing_nearest(const EcvGrid& grid) {
    FillResult result;
    result.grid = grid;
    EcvGrid& out = result.grid;

    const std::size_t n_lat = grid.n_lat();
    const std::size_t n_lon = grid.n_lon();
    const double spacing = std::min(min_axis_spacing(grid.lat_centers),
                                    min_axis_spacing(grid.lon_centers));
    const std::size_t max_radius = std::max(n_lat, n_lon);

    for (std::size_t c = 0; c < kEcvChannels; ++c) {
        const auto& known = grid.known[c];
        if (std::find(known.begin(), known.end(), std::uint8_t{1}) == known.end()) {
            result.all_missing_channels.push_back(c);
            continue;
        }
        for (std::size_t i = 0; i < n_lat; ++i) {
            for (std::size_t j = 0; j < n_lon; ++j) {
                const std::size_t idx = grid.point_index(i, j);
                if (known[idx]) continue;

                Best best;
                auto consider_point = [&](std::size_t pi, std::size_t pj) {
                    const std::size_t pidx = grid.point_index(pi, pj);
                    if (!known[pidx]) return;
                    const double dlat = grid.lat_centers[pi] - grid.lat_centers[i];
                    const double dlon = grid.lon_centers[pj] - grid.lon_centers[j];
                    best.consider(dlat * dlat + dlon * dlon, grid.lat_centers[pi],
                                  grid.lon_centers[pj], pidx);
                };

                for (std::size_t r = 1; r <= max_radius; ++r) {
                    if (best.found) {
                        const double ring_min = static_cast<double>(r) * spacing;
                        if (ring_min * ring_min > best.d2) break;
                    }
                    const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(i) -
                                              static_cast<std::ptrdiff_t>(r);
                    const std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(i) +
                                              static_cast<std::ptrdiff_t>(r);
                    const std::ptrdiff_t j0 = static_cast<std::ptrdiff_t>(j) -
                                              static_cast<std::ptrdiff_t>(r);
                    const std::ptrdiff_t j1 = static_cast<std::ptrdiff_t>(j) +
                                              static_cast<std::ptrdiff_t>(r);
                    for (std::ptrdiff_t pj = j0; pj <= j1; ++pj) {
                        if (pj < 0 || pj >= static_cast<std::ptrdiff_t>(n_lon)) continue;
                        if (i0 >= 0) consider_point(static_cast<std::size_t>(i0),
                                                    static_cast<std::size_t>(pj));
                        if (i1 < static_cast<std::ptrdiff_t>(n_lat)) {
                            consider_point(static_cast<std::size_t>(i1),
                                           static_cast<std::size_t>(pj));
                        }
                    }
                    for (std::ptrdiff_t pi = i0 + 1; pi <= i1 - 1; ++pi) {
                        if (pi < 0 || pi >= static_cast<std::ptrdiff_t>(n_lat)) continue;
                        if (j0 >= 0) consider_point(static_cast<std::size_t>(pi),
                                                    static_cast<std::size_t>(j0));
                        if (j1 < static_cast<std::ptrdiff_t>(n_lon)) {
                            consider_point(static_cast<std::size_t>(pi),
                                           static_cast<std::size_t>(j1));
                        }
                    }
                }
                out.values[c][idx] = grid.values[c][best.idx];
                out.known[c][idx] = 1;
            }
        }
    }
    return result;
}

namespace {

// The lattice is a cross product, so the nearest point uses the bracketing
// coordinates on each axis; ties resolve to smallest lat then lon.
std::size_t nearest_point(const EcvGrid& grid, double lat, double lon,
                          double& out_d2) {
    auto candidates = [](const std::vector<double>& coords, double v) {
        std::vector<std::size_t> c;
        const std::size_t hi = coord_index(coords, v);
        if (hi > 0) c.push_back(hi - 1);
        if (hi < coords.size()) c.push_back(hi);
        return c;
    };
    Best best;
    for (std::size_t li : candidates(grid.lat_centers, lat)) {
        for (std::size_t lj : candidates(grid.lon_centers, lon)) {
            const double dlat = grid.lat_centers[li] - lat;
            const double dlon = grid.lon_centers[lj] - lon;
            best.consider(dlat * dlat + dlon * dlon, grid.lat_centers[li],
                          grid.lon_centers[lj], grid.point_index(li, lj));
        }
    }
    out_d2 = best.d2;
    return best.idx;
}

} // namespace

Table join_cells(const SupervisedTable& table, const std::map<int, EcvGrid>& grids) {
    Table out;
    out.columns = kFeatureTableColumns;
    out.data.assign(out.columns.size(), {});
    for (auto& col : out.data) col.reserve(table.rows.size());

    for (const SupervisedRow& r : table.rows) {
        auto git = grids.find(r.year);
        if (git == grids.end()) {
            raise(errc::missing_year_grid,
                  "no ecv grid for year " + std::to_string(r.year));
        }
        const EcvGrid& grid = git->second;
        if (grid.n_points() == 0) {
            raise(errc::missing_year_grid,
                  "empty ecv grid for year " + std::to_string(r.year));
        }
        double d2 = 0.0;
        const std::size_t idx = nearest_point(grid, r.lat_center, r.lon_center, d2);

        out.data[0].push_back(static_cast<double>(r.cell_id));
        out.data[1].push_back(static_cast<double>(r.year));
        out.data[2].push_back(r.lat_center);
        out.data[3].push_back(r.lon_center);
        out.data[4].push_back(r.area);
        out.data[5].push_back(r.perimeter);
        for (std::size_t c = 0; c < kEcvChannels; ++c) {
            if (!grid.known[c][idx]) {
                raise(errc::missing_value,
                      "nearest ecv point is missing channel " +
                          std::string(kEcvChannelNames[c]) + "; fill the grid first");
            }
            out.data[6 + c].push_back(grid.values[c][idx]);
        }
        out.data[12].push_back(r.area_next);
    }
    return out;
}

} // namespace coastcast
