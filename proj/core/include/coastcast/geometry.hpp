#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace coastcast {

struct Vertex {
    double lon = 0.0; // degrees east
    double lat = 0.0; // degrees north

    bool operator==(const Vertex&) const = default;
};

// Vertices are stored closed: front() == back(). A valid ring has at least
// 4 stored vertices, no two consecutive vertices identical, nonzero area.
struct Ring {
    std::vector<Vertex> vertices;

    std::size_t size() const { return vertices.size(); }
    bool closed() const {
        return vertices.size() >= 2 && vertices.front() == vertices.back();
    }
};

// Signed shoelace area; positive for counter-clockwise winding.
double ring_signed_area(const Ring& ring);

double ring_perimeter(const Ring& ring);

// O(n^2) proper segment pair test, adjacent segments skipped.
bool ring_self_intersects(const Ring& ring);

struct Polygon {
    Ring outer;
    std::vector<Ring> holes;
};

// Net area: |outer| minus the hole areas. Assumes a fixed polygon.
double polygon_area(const Polygon& poly);

double polygon_perimeter(const Polygon& poly);

struct Bbox {
    double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;
};

Bbox polygon_bbox(const Polygon& poly);

struct VectorLayer {
    int year = 0;
    std::vector<Polygon> polygons;
    std::array<double, 4> source_bbox{}; // min_lon, min_lat, max_lon, max_lat
};

// Normalizes a parsed polygon: closes rings, strips consecutive duplicate
// vertices, drops zero-area rings, orients the outer ring CCW and holes CW.
// Idempotent. Throws all_rings_degenerate when the outer ring dies.
Polygon fix_geometry(const Polygon& poly);

struct FixLayerReport {
    std::size_t polygons_in = 0;
    std::size_t polygons_kept = 0;
    std::size_t polygons_dropped = 0; // fully degenerate
    std::size_t holes_dropped = 0;
    std::size_t self_intersecting_rings = 0; // warned, not repaired
};

FixLayerReport fix_layer(VectorLayer& layer);

} // namespace coastcast
