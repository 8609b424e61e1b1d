#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coastcast/error.hpp"
#include "coastcast/geometry.hpp"
#include "coastcast/rng.hpp"
#include "coastcast/shapefile.hpp"

#include "../helpers.hpp"

using namespace coastcast;
using testutil::ShpBuilder;

namespace {

std::vector<unsigned char> triangle_fixture() {
    ShpBuilder b;
    b.set_bbox(0, 0, 4, 3);
    b.add_polygon_record({{{0, 0}, {4, 0}, {0, 3}, {0, 0}}}, 1);
    return b.finish();
}

} // namespace

TEST_CASE("hand-crafted triangle record parses with area 6") {
    const auto bytes = triangle_fixture();
    const VectorLayer layer = parse_shapefile(bytes);
    REQUIRE(layer.polygons.size() == 1);
    CHECK(layer.polygons[0].holes.empty());
    CHECK(polygon_area(layer.polygons[0]) == doctest::Approx(6.0));
    CHECK(layer.source_bbox[0] == doctest::Approx(0.0));
    CHECK(layer.source_bbox[2] == doctest::Approx(4.0));
}

TEST_CASE("zeroed file code raises BadMagic") {
    auto bytes = triangle_fixture();
    bytes[0] = bytes[1] = bytes[2] = bytes[3] = 0;
    CHECK(testutil::throws_errc([&] { parse_shapefile(bytes); }, errc::bad_magic));
}

TEST_CASE("valid header with no records is an empty layer") {
    ShpBuilder b;
    const auto bytes = b.finish();
    REQUIRE(bytes.size() == 100); // 50 words
    const VectorLayer layer = parse_shapefile(bytes);
    CHECK(layer.polygons.empty());
}

TEST_CASE("null records are skipped") {
    ShpBuilder b;
    b.add_null_record(1);
    b.add_polygon_record({{{0, 0}, {1, 0}, {0, 1}, {0, 0}}}, 2);
    b.add_null_record(3);
    const VectorLayer layer = parse_shapefile(b.finish());
    CHECK(layer.polygons.size() == 1);
}

TEST_CASE("record numbers must increase") {
    ShpBuilder b;
    b.add_polygon_record({{{0, 0}, {1, 0}, {0, 1}, {0, 0}}}, 2);
    b.add_polygon_record({{{2, 2}, {3, 2}, {2, 3}, {2, 2}}}, 1);
    CHECK(testutil::throws_errc([&] { parse_shapefile(b.finish()); },
                                errc::non_monotone_record_numbers));

    ShpBuilder b2;
    b2.add_polygon_record({{{0, 0}, {1, 0}, {0, 1}, {0, 0}}}, 1);
    b2.add_polygon_record({{{2, 2}, {3, 2}, {2, 3}, {2, 2}}}, 1);
    CHECK(testutil::throws_errc([&] { parse_shapefile(b2.finish()); },
                                errc::non_monotone_record_numbers));
}

TEST_CASE("unsupported shape types are typed errors") {
    ShpBuilder b(3); // polyline header
    CHECK(testutil::throws_errc([&] { parse_shapefile(b.finish()); },
                                errc::unsupported_shape_type));

    ShpBuilder b2;
    b2.add_polygon_record({{{0, 0}, {1, 0}, {0, 1}, {0, 0}}}, 1);
    auto bytes = b2.finish();
    // record shape type field sits right after the 8-byte record header
    bytes[108] = 8; // multipoint
    CHECK(testutil::throws_errc([&] { parse_shapefile(bytes); },
                                errc::unsupported_shape_type));
}

TEST_CASE("multi-ring record: clockwise outer plus counter-clockwise hole") {
    // ESRI file encoding is y-up clockwise for outers
    std::vector<Vertex> outer_cw = {{0, 0}, {0, 4}, {4, 4}, {4, 0}, {0, 0}};
    std::vector<Vertex> hole_ccw = {{1, 1}, {2, 1}, {2, 2}, {1, 2}, {1, 1}};
    ShpBuilder b;
    b.add_polygon_record({outer_cw, hole_ccw}, 1);
    const VectorLayer layer = parse_shapefile(b.finish());
    REQUIRE(layer.polygons.size() == 1);
    REQUIRE(layer.polygons[0].holes.size() == 1);
    const Polygon fixed = fix_geometry(layer.polygons[0]);
    CHECK(polygon_area(fixed) == doctest::Approx(15.0));
}

TEST_CASE("two clockwise rings become two polygons") {
    std::vector<Vertex> a = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}};
    std::vector<Vertex> b_ring = {{5, 5}, {5, 6}, {6, 6}, {6, 5}, {5, 5}};
    ShpBuilder b;
    b.add_polygon_record({a, b_ring}, 1);
    const VectorLayer layer = parse_shapefile(b.finish());
    CHECK(layer.polygons.size() == 2);
}

TEST_CASE("every strict prefix of a valid file is TruncatedRecord") {
    const auto bytes = triangle_fixture();
    Rng rng(31337);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const std::size_t len = static_cast<std::size_t>(rng.below(bytes.size()));
        std::vector<unsigned char> cut(bytes.begin(),
                                       bytes.begin() + static_cast<std::ptrdiff_t>(len));
        try {
            parse_shapefile(cut);
            FAIL("truncation parsed successfully at length ", len);
        } catch (const Error& e) {
            // the declared file length always exceeds a truncated buffer
            CHECK(e.code() == errc::truncated_record);
            ++checked;
        }
    }
    CHECK(checked == 300);
}

TEST_CASE("structural corruption never crashes and always raises typed errors") {
    Rng rng(777);
    ShpBuilder base;
    base.set_bbox(0, 0, 10, 10);
    base.add_polygon_record({{{0, 0}, {4, 0}, {0, 3}, {0, 0}}}, 1);
    base.add_polygon_record({{{5, 5}, {9, 5}, {5, 8}, {5, 5}}}, 2);
    const auto bytes = base.finish();

    int errors = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto fuzzed = bytes;
        switch (rng.below(6)) {
        case 0: // break the magic
            fuzzed[rng.below(4)] ^= 0xff;
            break;
        case 1: // break the declared file length
            fuzzed[24 + rng.below(4)] ^= 0x5a;
            break;
        case 2: // break the version
            fuzzed[28] ^= 0x01;
            break;
        case 3: // invalid header shape type
            fuzzed[32] = 7;
            break;
        case 4: // corrupt NumParts/NumPoints of record 1 (offsets 144, 148)
            fuzzed[144 + rng.below(8)] ^= 0xff;
            break;
        case 5: // record number / content length of record 1 (offset 100)
            fuzzed[100 + rng.below(8)] ^= 0xff;
            break;
        }
        if (fuzzed == bytes) continue;
        try {
            (void)parse_shapefile(fuzzed);
            // a flip can cancel out to a still-valid encoding only if it
            // produced the identical bytes, which is excluded above
            FAIL("corrupted file parsed cleanly on trial ", trial);
        } catch (const Error&) {
            ++errors;
        }
    }
    CHECK(errors > 0);
}
