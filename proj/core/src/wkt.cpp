#include "coastcast/wkt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "coastcast/csv.hpp"
#include "coastcast/error.hpp"

namespace coastcast {

namespace {

class WktScanner {
public:
    explicit WktScanner(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& why) const {
        raise(errc::wkt_syntax, why + " at byte " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    bool eat_keyword(std::string_view kw) {
        skip_ws();
        if (text_.size() - pos_ < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) {
                return false;
            }
        }
        pos_ += kw.size();
        return true;
    }

    double number() {
        skip_ws();
        double v = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc{}) fail("expected number");
        pos_ += static_cast<std::size_t>(res.ptr - first);
        return v;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

Ring parse_ring(WktScanner& sc) {
    sc.expect('(');
    Ring ring;
    do {
        Vertex v;
        v.lon = sc.number();
        v.lat = sc.number();
        ring.vertices.push_back(v);
    } while (sc.eat(','));
    sc.expect(')');

    if (!ring.closed()) ring.vertices.push_back(ring.vertices.front());

    std::vector<Vertex> uniq(ring.vertices.begin(), ring.vertices.end() - 1);
    std::sort(uniq.begin(), uniq.end(), [](const Vertex& a, const Vertex& b) {
        return a.lon != b.lon ? a.lon < b.lon : a.lat < b.lat;
    });
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 3) {
        raise(errc::empty_ring, "ring has fewer than 3 distinct vertices");
    }
    return ring;
}

Polygon parse_polygon_body(WktScanner& sc) {
    sc.expect('(');
    Polygon poly;
    poly.outer = parse_ring(sc);
    while (sc.eat(',')) poly.holes.push_back(parse_ring(sc));
    sc.expect(')');
    return poly;
}

void append_ring_wkt(std::string& out, const Ring& ring) {
    out += '(';
    for (std::size_t i = 0; i < ring.vertices.size(); ++i) {
        if (i) out += ',';
        out += format_double(ring.vertices[i].lon);
        out += ' ';
        out += format_double(ring.vertices[i].lat);
    }
    out += ')';
}

} // namespace

std::vector<Polygon> parse_wkt(std::string_view text) {
    WktScanner sc(text);
    std::vector<Polygon> out;
    if (sc.eat_keyword("MULTIPOLYGON")) {
        sc.expect('(');
        do {
            out.push_back(parse_polygon_body(sc));
        } while (sc.eat(','));
        sc.expect(')');
    } else if (sc.eat_keyword("POLYGON")) {
        out.push_back(parse_polygon_body(sc));
    } else {
        sc.fail("expected POLYGON or MULTIPOLYGON");
    }
    if (!sc.at_end()) sc.fail("trailing input");
    return out;
}

std::string to_wkt(const Polygon& poly) {
    std::string out = "POLYGON(";
    append_ring_wkt(out, poly.outer);
    for (const Ring& h : poly.holes) {
        out += ',';
        append_ring_wkt(out, h);
    }
    out += ')';
    return out;
}

VectorLayer read_wkt_layer(const std::string& path, int year) {
    const std::string text = read_file(path);
    VectorLayer layer;
    layer.year = year;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.remove_suffix(1);
        }
        if (line.empty()) continue;
        for (Polygon& p : parse_wkt(line)) layer.polygons.push_back(std::move(p));
    }
    double min_lon = std::numeric_limits<double>::infinity();
    double min_lat = std::numeric_limits<double>::infinity();
    double max_lon = -std::numeric_limits<double>::infinity();
    double max_lat = -std::numeric_limits<double>::infinity();
    for (const Polygon& p : layer.polygons) {
        const Bbox b = polygon_bbox(p);
        min_lon = std::min(min_lon, b.min_lon);
        min_lat = std::min(min_lat, b.min_lat);
        max_lon = std::max(max_lon, b.max_lon);
        max_lat = std::max(max_lat, b.max_lat);
    }
    if (layer.polygons.empty()) {
        layer.source_bbox = {0, 0, 0, 0};
    } else {
        layer.source_bbox = {min_lon, min_lat, max_lon, max_lat};
    }
    return layer;
}

std::string layer_to_wkt(const VectorLayer& layer) {
    std::string out;
    for (const Polygon& p : layer.polygons) {
        out += to_wkt(p);
        out += '\n';
    }
    return out;
}

} // namespace coastcast
