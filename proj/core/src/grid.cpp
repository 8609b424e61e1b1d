#include "coastcast/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"
#include "coastcast/parallel.hpp"

namespace coastcast {

GridSpec generate_grid(double min_lon, double max_lon, double min_lat,
                       double max_lat, double cell_side) {
    if (!(min_lon < max_lon) || !(min_lat < max_lat) || !(cell_side > 0.0)) {
        raise(errc::degenerate_bounds, "bounds must be well-ordered and cell_side > 0");
    }
    GridSpec g;
    g.min_lon = min_lon;
    g.max_lon = max_lon;
    g.min_lat = min_lat;
    g.max_lat = max_lat;
    g.cell_side = cell_side;
    g.n_cols = static_cast<std::size_t>(std::ceil((max_lon - min_lon) / cell_side));
    g.n_rows = static_cast<std::size_t>(std::ceil((max_lat - min_lat) / cell_side));
    return g;
}

Cell cell_at(const GridSpec& grid, std::size_t row, std::size_t col) {
    Cell c;
    c.cell_id = static_cast<long>(row * grid.n_cols + col);
    c.left = grid.min_lon + static_cast<double>(col) * grid.cell_side;
    c.right = col + 1 == grid.n_cols ? grid.max_lon : c.left + grid.cell_side;
    c.bottom = grid.min_lat + static_cast<double>(row) * grid.cell_side;
    c.top = row + 1 == grid.n_rows ? grid.max_lat : c.bottom + grid.cell_side;
    return c;
}

Cell cell_by_id(const GridSpec& grid, long cell_id) {
    const std::size_t id = static_cast<std::size_t>(cell_id);
    return cell_at(grid, id / grid.n_cols, id % grid.n_cols);
}

namespace {

enum class Edge { left, right, bottom, top };

bool inside(const Vertex& v, Edge e, const Cell& r) {
    switch (e) {
    case Edge::left: return v.lon >= r.left;
    case Edge::right: return v.lon <= r.right;
    case Edge::bottom: return v.lat >= r.bottom;
    case Edge::top: return v.lat <= r.top;
    }
    return false;
}

Vertex intersect_edge(const Vertex& a, const Vertex& b, Edge e, const Cell& r) {
    double t = 0.0;
    Vertex out;
    switch (e) {
    case Edge::left:
    case Edge::right: {
        const double x = e == Edge::left ? r.left : r.right;
        t = (x - a.lon) / (b.lon - a.lon);
        out.lon = x;
        out.lat = a.lat + t * (b.lat - a.lat);
        break;
    }
    case Edge::bottom:
    case Edge::top: {
        const double y = e == Edge::bottom ? r.bottom : r.top;
        t = (y - a.lat) / (b.lat - a.lat);
        out.lat = y;
        out.lon = a.lon + t * (b.lon - a.lon);
        break;
    }
    }
    return out;
}

// One Sutherland-Hodgman pass. Input and output are open rings.
void clip_ring_edge(const std::vector<Vertex>& in, Edge e, const Cell& r,
                    std::vector<Vertex>& out) {
    out.clear();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vertex& cur = in[i];
        const Vertex& prev = in[(i + n - 1) % n];
        const bool cur_in = inside(cur, e, r);
        const bool prev_in = inside(prev, e, r);
        if (cur_in) {
            if (!prev_in) out.push_back(intersect_edge(prev, cur, e, r));
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(intersect_edge(prev, cur, e, r));
        }
    }
}

// Returns a closed ring, or an empty one when the clip result is degenerate.
Ring clip_ring(const Ring& ring, const Cell& rect) {
    std::vector<Vertex> a(ring.vertices.begin(),
                          ring.vertices.end() - (ring.closed() ? 1 : 0));
    std::vector<Vertex> b;
    b.reserve(a.size() + 8);
    clip_ring_edge(a, Edge::left, rect, b);
    clip_ring_edge(b, Edge::right, rect, a);
    clip_ring_edge(a, Edge::bottom, rect, b);
    clip_ring_edge(b, Edge::top, rect, a);

    std::vector<Vertex> dedup;
    dedup.reserve(a.size());
    for (const Vertex& v : a) {
        if (dedup.empty() || !(dedup.back() == v)) dedup.push_back(v);
    }
    while (dedup.size() >= 2 && dedup.front() == dedup.back()) dedup.pop_back();
    if (dedup.size() < 3) return Ring{};

    Ring out;
    out.vertices = std::move(dedup);
    out.vertices.push_back(out.vertices.front());
    if (ring_signed_area(out) == 0.0) return Ring{};
    return out;
}

} // namespace

std::optional<Polygon> clip_polygon_to_rect(const Polygon& poly, const Cell& rect) {
    Polygon out;
    out.outer = clip_ring(poly.outer, rect);
    if (out.outer.vertices.empty()) return std::nullopt;
    for (const Ring& h : poly.holes) {
        Ring c = clip_ring(h, rect);
        if (!c.vertices.empty()) out.holes.push_back(std::move(c));
    }
    return out;
}

namespace {

struct Contribution {
    long cell_id;
    std::uint32_t polygon_index;
    double area;
    double perimeter;
};

double clipped_signed_area(const Polygon& clipped) {
    double s = ring_signed_area(clipped.outer);
    for (const Ring& h : clipped.holes) s += ring_signed_area(h);
    return s;
}

} // namespace

std::vector<CellYearRecord> intersect_layer(const VectorLayer& layer,
                                            const GridSpec& grid,
                                            std::size_t threads) {
    const std::size_t n = layer.polygons.size();
    const std::size_t n_chunks = std::max<std::size_t>(resolve_threads(threads), 1);
    std::vector<std::vector<Contribution>> per_chunk(n_chunks);

    parallel_chunks(n, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& contrib = per_chunk[chunk];
        for (std::size_t pi = begin; pi < end; ++pi) {
            const Polygon& poly = layer.polygons[pi];
            const Bbox bb = polygon_bbox(poly);
            if (bb.max_lon < grid.min_lon || bb.min_lon > grid.max_lon ||
                bb.max_lat < grid.min_lat || bb.min_lat > grid.max_lat) {
                continue;
            }
            auto col_of = [&](double lon) {
                const double f = (lon - grid.min_lon) / grid.cell_side;
                const long c = static_cast<long>(std::floor(f));
                return std::clamp<long>(c, 0, static_cast<long>(grid.n_cols) - 1);
            };
            auto row_of = [&](double lat) {
                const double f = (lat - grid.min_lat) / grid.cell_side;
                const long r = static_cast<long>(std::floor(f));
                return std::clamp<long>(r, 0, static_cast<long>(grid.n_rows) - 1);
            };
            const long c0 = col_of(bb.min_lon);
            const long c1 = col_of(bb.max_lon);
            const long r0 = row_of(bb.min_lat);
            const long r1 = row_of(bb.max_lat);
            for (long row = r0; row <= r1; ++row) {
                for (long col = c0; col <= c1; ++col) {
                    const Cell cell = cell_at(grid, static_cast<std::size_t>(row),
                                              static_cast<std::size_t>(col));
                    auto clipped = clip_polygon_to_rect(poly, cell);
                    if (!clipped) continue;
                    contrib.push_back(Contribution{
                        cell.cell_id, static_cast<std::uint32_t>(pi),
                        clipped_signed_area(*clipped), polygon_perimeter(*clipped)});
                }
            }
        }
    });

    // Deterministic reduction: accumulate in global polygon order per cell,
    // so the result does not depend on the thread count.
    std::map<long, CellYearRecord> cells;
    for (const auto& chunk : per_chunk) {
        for (const Contribution& c : chunk) {
            auto [it, inserted] = cells.try_emplace(c.cell_id);
            CellYearRecord& rec = it->second;
            if (inserted) {
                const Cell cell = cell_by_id(grid, c.cell_id);
                rec.cell_id = c.cell_id;
                rec.year = layer.year;
                rec.left = cell.left;
                rec.top = cell.top;
                rec.bottom = cell.bottom;
                rec.right = cell.right;
            }
            rec.area += c.area;
            rec.perimeter += c.perimeter;
        }
    }

    std::vector<CellYearRecord> out;
    out.reserve(cells.size());
    for (auto& [id, rec] : cells) out.push_back(rec);
    return out;
}

std::string records_to_csv(const std::vector<CellYearRecord>& records) {
    CsvWriter w({"cell_id", "year", "left", "top", "bottom", "right", "area",
                 "perimeter"});
    for (const CellYearRecord& r : records) {
        w.field(r.cell_id);
        w.field(r.year);
        w.field(r.left);
        w.field(r.top);
        w.field(r.bottom);
        w.field(r.right);
        w.field(r.area);
        w.field(r.perimeter);
        w.end_row();
    }
    return w.str();
}

std::vector<CellYearRecord> records_from_csv(std::string_view text) {
    const CsvDoc doc = read_csv(text);
    const std::vector<std::string> expect = {"cell_id", "year",   "left",
                                             "top",     "bottom", "right",
                                             "area",    "perimeter"};
    if (doc.header != expect) {
        raise(errc::bad_argument, "unexpected cell record csv header");
    }
    std::vector<CellYearRecord> out;
    out.reserve(doc.rows.size());
    std::size_t line = 1;
    for (const auto& row : doc.rows) {
        ++line;
        CellYearRecord r;
        r.cell_id = static_cast<long>(parse_double(row[0], line));
        r.year = static_cast<int>(parse_double(row[1], line));
        r.left = parse_double(row[2], line);
        r.top = parse_double(row[3], line);
        r.bottom = parse_double(row[4], line);
        r.right = parse_double(row[5], line);
        r.area = parse_double(row[6], line);
        r.perimeter = parse_double(row[7], line);
        out.push_back(r);
    }
    return out;
}

} // namespace coastcast
