#include "coastcast/shapefile.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "coastcast/error.hpp"

namespace coastcast {

namespace {

constexpr std::int32_t kFileCode = 9994;
constexpr std::int32_t kVersion = 1000;
constexpr std::int32_t kNullShape = 0;
constexpr std::int32_t kPolygonShape = 5;
constexpr std::size_t kHeaderBytes = 100;

class ByteReader {
public:
    ByteReader(std::span<const unsigned char> bytes, std::size_t offset,
               std::size_t limit)
        : bytes_(bytes), pos_(offset), limit_(limit) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return limit_ - pos_; }

    void require(std::size_t n) const {
        if (pos_ + n > limit_) {
            raise(errc::truncated_record,
                  "need " + std::to_string(n) + " bytes at offset " +
                      std::to_string(pos_) + ", have " + std::to_string(remaining()));
        }
    }

    std::int32_t i32_be() {
        require(4);
        std::uint32_t v = (std::uint32_t(bytes_[pos_]) << 24) |
                          (std::uint32_t(bytes_[pos_ + 1]) << 16) |
                          (std::uint32_t(bytes_[pos_ + 2]) << 8) |
                          std::uint32_t(bytes_[pos_ + 3]);
        pos_ += 4;
        return static_cast<std::int32_t>(v);
    }

    std::int32_t i32_le() {
        require(4);
        std::uint32_t v = std::uint32_t(bytes_[pos_]) |
                          (std::uint32_t(bytes_[pos_ + 1]) << 8) |
                          (std::uint32_t(bytes_[pos_ + 2]) << 16) |
                          (std::uint32_t(bytes_[pos_ + 3]) << 24);
        pos_ += 4;
        return static_cast<std::int32_t>(v);
    }

    double f64_le() {
        require(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
        pos_ += 8;
        double d;
        std::memcpy(&d, &v, sizeof d);
        return d;
    }

private:
    std::span<const unsigned char> bytes_;
    std::size_t pos_;
    std::size_t limit_;
};

void append_record_polygons(ByteReader& rec, std::vector<Polygon>& out) {
    for (int i = 0; i < 4; ++i) (void)rec.f64_le(); // record box, unused

    const std::int32_t num_parts = rec.i32_le();
    const std::int32_t num_points = rec.i32_le();
    if (num_parts <= 0 || num_points < num_parts) {
        raise(errc::malformed_record,
              "bad part/point counts " + std::to_string(num_parts) + "/" +
                  std::to_string(num_points));
    }
    const std::size_t expected =
        static_cast<std::size_t>(num_parts) * 4 + static_cast<std::size_t>(num_points) * 16;
    if (rec.remaining() != expected) {
        raise(errc::malformed_record,
              "record content size does not match NumParts/NumPoints");
    }

    std::vector<std::int32_t> parts(static_cast<std::size_t>(num_parts));
    for (auto& p : parts) p = rec.i32_le();
    if (parts[0] != 0) raise(errc::malformed_record, "first part index not 0");
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i] <= parts[i - 1] || parts[i] >= num_points) {
            raise(errc::malformed_record, "part start indices not ascending");
        }
    }

    std::vector<Vertex> points(static_cast<std::size_t>(num_points));
    for (auto& v : points) {
        v.lon = rec.f64_le();
        v.lat = rec.f64_le();
    }

    Polygon* current = nullptr;
    for (std::size_t part = 0; part < parts.size(); ++part) {
        const std::size_t begin = static_cast<std::size_t>(parts[part]);
        const std::size_t end =
            part + 1 < parts.size() ? static_cast<std::size_t>(parts[part + 1])
                                    : points.size();
        Ring ring;
        ring.vertices.assign(points.begin() + static_cast<std::ptrdiff_t>(begin),
                             points.begin() + static_cast<std::ptrdiff_t>(end));
        const double signed_area = ring_signed_area(ring);
        // ESRI outer rings are clockwise in file encoding
        if (signed_area < 0.0 || current == nullptr) {
            out.push_back(Polygon{std::move(ring), {}});
            current = &out.back();
        } else {
            current->holes.push_back(std::move(ring));
        }
    }
}

} // namespace

VectorLayer parse_shapefile(std::span<const unsigned char> bytes, int year) {
    ByteReader hdr(bytes, 0, bytes.size());
    if (bytes.size() < kHeaderBytes) {
        raise(errc::truncated_record, "file shorter than 100-byte header");
    }

    const std::int32_t file_code = hdr.i32_be();
    if (file_code != kFileCode) {
        raise(errc::bad_magic, "file code " + std::to_string(file_code));
    }
    for (int i = 0; i < 5; ++i) (void)hdr.i32_be(); // unused reserved words
    const std::int32_t file_words = hdr.i32_be();
    const std::int64_t declared_bytes = std::int64_t{file_words} * 2;
    if (declared_bytes < std::int64_t{kHeaderBytes}) {
        raise(errc::malformed_record, "declared file length shorter than header");
    }
    if (declared_bytes > static_cast<std::int64_t>(bytes.size())) {
        raise(errc::truncated_record,
              "declared length " + std::to_string(declared_bytes) +
                  " bytes, actual " + std::to_string(bytes.size()));
    }
    if (declared_bytes < static_cast<std::int64_t>(bytes.size())) {
        raise(errc::malformed_record, "trailing bytes beyond declared file length");
    }

    const std::int32_t version = hdr.i32_le();
    if (version != kVersion) {
        raise(errc::malformed_record, "version " + std::to_string(version));
    }
    const std::int32_t shape_type = hdr.i32_le();
    if (shape_type != kNullShape && shape_type != kPolygonShape) {
        raise(errc::unsupported_shape_type,
              "header shape type " + std::to_string(shape_type));
    }
    const double xmin = hdr.f64_le();
    const double ymin = hdr.f64_le();
    const double xmax = hdr.f64_le();
    const double ymax = hdr.f64_le();

    VectorLayer layer;
    layer.year = year;
    layer.source_bbox = {xmin, ymin, xmax, ymax};

    ByteReader body(bytes, kHeaderBytes, static_cast<std::size_t>(declared_bytes));
    std::int64_t prev_record = 0;
    while (body.remaining() > 0) {
        const std::int32_t record_number = body.i32_be();
        const std::int32_t content_words = body.i32_be();
        if (record_number <= prev_record) {
            raise(errc::non_monotone_record_numbers,
                  "record " + std::to_string(record_number) + " after " +
                      std::to_string(prev_record));
        }
        prev_record = record_number;
        if (content_words < 2) {
            raise(errc::malformed_record, "record content shorter than shape type");
        }
        const std::size_t content_bytes = static_cast<std::size_t>(content_words) * 2;
        body.require(content_bytes);
        ByteReader rec(bytes, body.pos(), body.pos() + content_bytes);

        const std::int32_t rec_type = rec.i32_le();
        if (rec_type == kNullShape) {
            if (content_bytes != 4) {
                raise(errc::malformed_record, "null record with extra content");
            }
        } else if (rec_type == kPolygonShape) {
            append_record_polygons(rec, layer.polygons);
        } else {
            raise(errc::unsupported_shape_type,
                  "record shape type " + std::to_string(rec_type));
        }

        // advance past the record regardless of how much the record parser used
        ByteReader next(bytes, body.pos() + content_bytes,
                        static_cast<std::size_t>(declared_bytes));
        body = next;
    }

    // keep the invariant that source_bbox contains every vertex even when the
    // header box is stale
    for (const Polygon& p : layer.polygons) {
        const Bbox b = polygon_bbox(p);
        layer.source_bbox[0] = std::min(layer.source_bbox[0], b.min_lon);
        layer.source_bbox[1] = std::min(layer.source_bbox[1], b.min_lat);
        layer.source_bbox[2] = std::max(layer.source_bbox[2], b.max_lon);
        layer.source_bbox[3] = std::max(layer.source_bbox[3], b.max_lat);
    }
    return layer;
}

VectorLayer read_shapefile_layer(const std::string& path, int year) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::io_error, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return parse_shapefile(bytes, year);
}

} // namespace coastcast
