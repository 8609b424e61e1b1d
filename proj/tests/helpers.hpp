#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <vector>

#include "coastcast/error.hpp"
#include "coastcast/geometry.hpp"
#include "coastcast/rng.hpp"

namespace testutil {

inline bool throws_errc(const std::function<void()>& fn, coastcast::errc code) {
    try {
        fn();
    } catch (const coastcast::Error& e) {
        return e.code() == code;
    } catch (...) {
        return false;
    }
    return false;
}

// Assembles .shp bytes by hand, independently of the production parser.
class ShpBuilder {
public:
    explicit ShpBuilder(std::int32_t shape_type = 5) {
        bytes_.resize(100, 0);
        put_i32_be(0, 9994);
        put_i32_le(28, 1000);
        put_i32_le(32, shape_type);
    }

    void set_bbox(double xmin, double ymin, double xmax, double ymax) {
        put_f64_le(36, xmin);
        put_f64_le(44, ymin);
        put_f64_le(52, xmax);
        put_f64_le(60, ymax);
    }

    // rings as open vertex lists; encoded in declaration order
    void add_polygon_record(const std::vector<std::vector<coastcast::Vertex>>& rings,
                            std::int32_t record_number) {
        std::int32_t num_points = 0;
        for (const auto& r : rings) num_points += static_cast<std::int32_t>(r.size());
        const std::int32_t num_parts = static_cast<std::int32_t>(rings.size());
        const std::int32_t content_bytes = 4 + 32 + 4 + 4 + 4 * num_parts + 16 * num_points;

        append_i32_be(record_number);
        append_i32_be(content_bytes / 2);
        append_i32_le(5);
        double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
        for (const auto& r : rings) {
            for (const auto& v : r) {
                xmin = std::min(xmin, v.lon);
                ymin = std::min(ymin, v.lat);
                xmax = std::max(xmax, v.lon);
                ymax = std::max(ymax, v.lat);
            }
        }
        append_f64_le(xmin);
        append_f64_le(ymin);
        append_f64_le(xmax);
        append_f64_le(ymax);
        append_i32_le(num_parts);
        append_i32_le(num_points);
        std::int32_t start = 0;
        for (const auto& r : rings) {
            append_i32_le(start);
            start += static_cast<std::int32_t>(r.size());
        }
        for (const auto& r : rings) {
            for (const auto& v : r) {
                append_f64_le(v.lon);
                append_f64_le(v.lat);
            }
        }
    }

    void add_null_record(std::int32_t record_number) {
        append_i32_be(record_number);
        append_i32_be(2);
        append_i32_le(0);
    }

    std::vector<unsigned char> finish() {
        std::vector<unsigned char> out = bytes_;
        const std::int32_t words = static_cast<std::int32_t>(out.size() / 2);
        out[24] = static_cast<unsigned char>((words >> 24) & 0xff);
        out[25] = static_cast<unsigned char>((words >> 16) & 0xff);
        out[26] = static_cast<unsigned char>((words >> 8) & 0xff);
        out[27] = static_cast<unsigned char>(words & 0xff);
        return out;
    }

    void put_i32_be(std::size_t off, std::int32_t v) {
        bytes_[off] = static_cast<unsigned char>((v >> 24) & 0xff);
        bytes_[off + 1] = static_cast<unsigned char>((v >> 16) & 0xff);
        bytes_[off + 2] = static_cast<unsigned char>((v >> 8) & 0xff);
        bytes_[off + 3] = static_cast<unsigned char>(v & 0xff);
    }

    void put_i32_le(std::size_t off, std::int32_t v) {
        bytes_[off] = static_cast<unsigned char>(v & 0xff);
        bytes_[off + 1] = static_cast<unsigned char>((v >> 8) & 0xff);
        bytes_[off + 2] = static_cast<unsigned char>((v >> 16) & 0xff);
        bytes_[off + 3] = static_cast<unsigned char>((v >> 24) & 0xff);
    }

    void put_f64_le(std::size_t off, double d) {
        std::uint64_t u = 0;
        std::memcpy(&u, &d, sizeof u);
        for (int i = 0; i < 8; ++i) {
            bytes_[off + static_cast<std::size_t>(i)] =
                static_cast<unsigned char>((u >> (8 * i)) & 0xff);
        }
    }

private:
    void append_i32_be(std::int32_t v) {
        bytes_.resize(bytes_.size() + 4);
        put_i32_be(bytes_.size() - 4, v);
    }
    void append_i32_le(std::int32_t v) {
        bytes_.resize(bytes_.size() + 4);
        put_i32_le(bytes_.size() - 4, v);
    }
    void append_f64_le(double d) {
        bytes_.resize(bytes_.size() + 8);
        put_f64_le(bytes_.size() - 8, d);
    }

    std::vector<unsigned char> bytes_;
};

// Star-shaped polygon around (cx, cy): simple by construction.
inline coastcast::Polygon star_polygon(coastcast::Rng& rng, double cx, double cy,
                                       double r_min, double r_max,
                                       std::size_t n_vertices = 10) {
    coastcast::Polygon p;
    for (std::size_t k = 0; k < n_vertices; ++k) {
        const double theta = 2.0 * 3.14159265358979323846 *
                             (static_cast<double>(k) +
                              0.7 * rng.uniform()) /
                             static_cast<double>(n_vertices);
        const double r = rng.uniform(r_min, r_max);
        p.outer.vertices.push_back(
            {cx + r * std::cos(theta), cy + r * std::sin(theta)});
    }
    p.outer.vertices.push_back(p.outer.vertices.front());
    return p;
}

// Ray casting, counting boundary as inside; good enough for MC estimates.
inline bool point_in_ring(const coastcast::Ring& ring, double x, double y) {
    bool in = false;
    const auto& v = ring.vertices;
    const std::size_t n = ring.closed() ? v.size() - 1 : v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool cross = ((v[i].lat > y) != (v[j].lat > y)) &&
                           (x < (v[j].lon - v[i].lon) * (y - v[i].lat) /
                                        (v[j].lat - v[i].lat) +
                                    v[i].lon);
        if (cross) in = !in;
    }
    return in;
}

inline bool point_in_polygon(const coastcast::Polygon& poly, double x, double y) {
    if (!point_in_ring(poly.outer, x, y)) return false;
    for (const auto& h : poly.holes) {
        if (point_in_ring(h, x, y)) return false;
    }
    return true;
}

} // namespace testutil
