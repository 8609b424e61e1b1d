#include "coastcast/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coastcast/error.hpp"

namespace coastcast {

double ring_signed_area(const Ring& ring) {
    const auto& v = ring.vertices;
    if (v.size() < 3) return 0.0;
    double s = 0.0;
    if (ring.closed()) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            s += v[i].lon * v[i + 1].lat - v[i + 1].lon * v[i].lat;
        }
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Vertex& a = v[i];
            const Vertex& b = v[(i + 1) % v.size()];
            s += a.lon * b.lat - b.lon * a.lat;
        }
    }
    return 0.5 * s;
}

double ring_perimeter(const Ring& ring) {
    const auto& v = ring.vertices;
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        s += std::hypot(v[i + 1].lon - v[i].lon, v[i + 1].lat - v[i].lat);
    }
    if (!ring.closed()) {
        s += std::hypot(v.front().lon - v.back().lon, v.front().lat - v.back().lat);
    }
    return s;
}

namespace {

int orientation_sign(const Vertex& a, const Vertex& b, const Vertex& c) {
    const double v = (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(const Vertex& a, const Vertex& b, const Vertex& p) {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(const Vertex& p1, const Vertex& p2, const Vertex& q1,
                        const Vertex& q2) {
    const int o1 = orientation_sign(p1, p2, q1);
    const int o2 = orientation_sign(p1, p2, q2);
    const int o3 = orientation_sign(q1, q2, p1);
    const int o4 = orientation_sign(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

} // namespace

bool ring_self_intersects(const Ring& ring) {
    const auto& v = ring.vertices;
    const std::size_t n = ring.closed() ? v.size() - 1 : v.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vertex& a1 = v[i];
        const Vertex& a2 = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // skip segments sharing an endpoint
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const Vertex& b1 = v[j];
            const Vertex& b2 = v[(j + 1) % n];
            if (segments_intersect(a1, a2, b1, b2)) return true;
        }
    }
    return false;
}

double polygon_area(const Polygon& poly) {
    double area = std::fabs(ring_signed_area(poly.outer));
    for (const Ring& h : poly.holes) area -= std::fabs(ring_signed_area(h));
    return area;
}

double polygon_perimeter(const Polygon& poly) {
    double s = ring_perimeter(poly.outer);
    for (const Ring& h : poly.holes) s += ring_perimeter(h);
    return s;
}

Bbox polygon_bbox(const Polygon& poly) {
    Bbox b{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
    auto extend = [&b](const Ring& r) {
        for (const Vertex& v : r.vertices) {
            b.min_lon = std::min(b.min_lon, v.lon);
            b.min_lat = std::min(b.min_lat, v.lat);
            b.max_lon = std::max(b.max_lon, v.lon);
            b.max_lat = std::max(b.max_lat, v.lat);
        }
    };
    extend(poly.outer);
    for (const Ring& h : poly.holes) extend(h);
    return b;
}

namespace {

// nullopt-style: empty ring means degenerate.
Ring normalize_ring(const Ring& in, bool want_ccw) {
    for (const Vertex& v : in.vertices) {
        if (!std::isfinite(v.lon) || !std::isfinite(v.lat)) return Ring{};
    }
    std::vector<Vertex> open(in.vertices);
    if (open.size() >= 2 && open.front() == open.back()) open.pop_back();

    std::vector<Vertex> dedup;
    dedup.reserve(open.size());
    for (const Vertex& v : open) {
        if (dedup.empty() || !(dedup.back() == v)) dedup.push_back(v);
    }
    while (dedup.size() >= 2 && dedup.front() == dedup.back()) dedup.pop_back();

    if (dedup.size() < 3) return Ring{};

    Ring ring;
    ring.vertices = std::move(dedup);
    ring.vertices.push_back(ring.vertices.front());

    const double signed_area = ring_signed_area(ring);
    if (signed_area == 0.0) return Ring{};
    const bool is_ccw = signed_area > 0.0;
    if (is_ccw != want_ccw) {
        std::reverse(ring.vertices.begin(), ring.vertices.end());
    }
    return ring;
}

} // namespace

Polygon fix_geometry(const Polygon& poly) {
    Polygon out;
    out.outer = normalize_ring(poly.outer, /*want_ccw=*/true);
    if (out.outer.vertices.empty()) {
        raise(errc::all_rings_degenerate, "outer ring has no area");
    }
    for (const Ring& h : poly.holes) {
        Ring fixed = normalize_ring(h, /*want_ccw=*/false);
        if (!fixed.vertices.empty()) out.holes.push_back(std::move(fixed));
    }
    return out;
}

FixLayerReport fix_layer(VectorLayer& layer) {
    FixLayerReport report;
    report.polygons_in = layer.polygons.size();
    std::vector<Polygon> kept;
    kept.reserve(layer.polygons.size());
    for (const Polygon& p : layer.polygons) {
        try {
            Polygon fixed = fix_geometry(p);
            report.holes_dropped += p.holes.size() - fixed.holes.size();
            if (ring_self_intersects(fixed.outer)) ++report.self_intersecting_rings;
            for (const Ring& h : fixed.holes) {
                if (ring_self_intersects(h)) ++report.self_intersecting_rings;
            }
            kept.push_back(std::move(fixed));
        } catch (const Error& e) {
            if (e.code() != errc::all_rings_degenerate) throw;
            ++report.polygons_dropped;
        }
    }
    report.polygons_kept = kept.size();
    layer.polygons = std::move(kept);
    return report;
}

} // namespace coastcast
