#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coastcast/error.hpp"
#include "coastcast/grid.hpp"
#include "coastcast/rng.hpp"

#include "../helpers.hpp"

using namespace coastcast;

namespace {

Polygon unit_square_at(double x, double y) {
    Polygon p;
    p.outer.vertices = {{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}, {x, y}};
    return p;
}

// all-cells clipping, no candidate index; the pruning oracle
std::vector<CellYearRecord> brute_force_intersect(const VectorLayer& layer,
                                                  const GridSpec& grid) {
    std::vector<CellYearRecord> out;
    for (std::size_t row = 0; row < grid.n_rows; ++row) {
        for (std::size_t col = 0; col < grid.n_cols; ++col) {
            const Cell cell = cell_at(grid, row, col);
            CellYearRecord rec;
            rec.cell_id = cell.cell_id;
            rec.year = layer.year;
            rec.left = cell.left;
            rec.top = cell.top;
            rec.bottom = cell.bottom;
            rec.right = cell.right;
            bool touched = false;
            for (const Polygon& p : layer.polygons) {
                auto clipped = clip_polygon_to_rect(p, cell);
                if (!clipped) continue;
                touched = true;
                double area = ring_signed_area(clipped->outer);
                for (const Ring& h : clipped->holes) area += ring_signed_area(h);
                rec.area += area;
                rec.perimeter += polygon_perimeter(*clipped);
            }
            if (touched) out.push_back(rec);
        }
    }
    return out;
}

} // namespace

TEST_CASE("2x2 grid tiling and ids") {
    const GridSpec g = generate_grid(0, 2, 0, 2, 1.0);
    CHECK(g.n_cols == 2);
    CHECK(g.n_rows == 2);
    const Cell c3 = cell_by_id(g, 3);
    CHECK(c3.left == doctest::Approx(1.0));
    CHECK(c3.right == doctest::Approx(2.0));
    CHECK(c3.bottom == doctest::Approx(1.0));
    CHECK(c3.top == doctest::Approx(2.0));
}

TEST_CASE("default study bounds give a 395x81 grid") {
    const GridSpec g = generate_grid(kDefaultBounds[0], kDefaultBounds[1],
                                     kDefaultBounds[2], kDefaultBounds[3],
                                     kDefaultCellSide);
    CHECK(g.n_cols == 395);
    CHECK(g.n_rows == 81);
}

TEST_CASE("degenerate bounds are rejected") {
    CHECK(testutil::throws_errc([] { generate_grid(1, 1, 0, 2, 1); },
                                errc::degenerate_bounds));
    CHECK(testutil::throws_errc([] { generate_grid(0, 2, 0, 2, 0); },
                                errc::degenerate_bounds));
    CHECK(testutil::throws_errc([] { generate_grid(2, 0, 0, 2, 1); },
                                errc::degenerate_bounds));
}

TEST_CASE("non-divisible bounds clamp the last column and row") {
    const GridSpec g = generate_grid(0, 2.5, 0, 1.7, 1.0);
    CHECK(g.n_cols == 3);
    CHECK(g.n_rows == 2);
    const Cell last = cell_at(g, 1, 2);
    CHECK(last.right == doctest::Approx(2.5));
    CHECK(last.top == doctest::Approx(1.7));
    // cells tile the bounds exactly
    double total = 0.0;
    for (std::size_t id = 0; id < g.cell_count(); ++id) {
        const Cell c = cell_by_id(g, static_cast<long>(id));
        total += (c.right - c.left) * (c.top - c.bottom);
    }
    CHECK(total == doctest::Approx(2.5 * 1.7).epsilon(1e-12));
}

TEST_CASE("single-cell grid equals its bounds") {
    const GridSpec g = generate_grid(0, 1, 0, 1, 1.0);
    CHECK(g.cell_count() == 1);
    const Cell c = cell_by_id(g, 0);
    CHECK(c.left == 0.0);
    CHECK(c.right == 1.0);
    CHECK(c.bottom == 0.0);
    CHECK(c.top == 1.0);
}

TEST_CASE("clip keeps half of a square cut down the middle") {
    const Polygon sq = unit_square_at(0, 0);
    Cell rect{0, 0.0, 0.5, 1.0, 0.0}; // left=0 right=0.5 top=1 bottom=0
    auto clipped = clip_polygon_to_rect(sq, rect);
    REQUIRE(clipped.has_value());
    CHECK(polygon_area(*clipped) == doctest::Approx(0.5));
}

TEST_CASE("square centered on a 4-cell corner splits into four quarters") {
    const GridSpec g = generate_grid(0, 2, 0, 2, 1.0);
    const Polygon sq = unit_square_at(0.5, 0.5);
    for (long id = 0; id < 4; ++id) {
        auto clipped = clip_polygon_to_rect(sq, cell_by_id(g, id));
        REQUIRE(clipped.has_value());
        CHECK(polygon_area(*clipped) == doctest::Approx(0.25));
    }
}

TEST_CASE("clip returns empty for a disjoint rectangle") {
    const Polygon sq = unit_square_at(0, 0);
    Cell rect{0, 5.0, 6.0, 6.0, 5.0};
    CHECK(!clip_polygon_to_rect(sq, rect).has_value());
}

TEST_CASE("partition of unity: clipped areas over a covering grid sum exactly") {
    Rng rng(90210);
    const GridSpec g = generate_grid(-5, 5, -5, 5, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Polygon p = fix_geometry(testutil::star_polygon(
            rng, rng.uniform(-3, 3), rng.uniform(-3, 3), 0.2, 1.9, 5 + trial % 9));
        double total = 0.0;
        for (std::size_t id = 0; id < g.cell_count(); ++id) {
            auto clipped = clip_polygon_to_rect(p, cell_by_id(g, static_cast<long>(id)));
            if (clipped) total += polygon_area(*clipped);
        }
        CHECK(total == doctest::Approx(polygon_area(p)).epsilon(1e-9));
    }
}

TEST_CASE("clipping to a sub-rectangle never increases area") {
    Rng rng(1414);
    for (int trial = 0; trial < 200; ++trial) {
        const Polygon p = fix_geometry(
            testutil::star_polygon(rng, 0, 0, 0.3, 2.0, 5 + trial % 7));
        Cell outer{0, rng.uniform(-3, -0.5), 0.0, 0.0, rng.uniform(-3, -0.5)};
        outer.right = outer.left + rng.uniform(1.0, 4.0);
        outer.top = outer.bottom + rng.uniform(1.0, 4.0);
        Cell inner = outer;
        inner.left += rng.uniform(0, 0.5);
        inner.right -= rng.uniform(0, 0.5);
        inner.bottom += rng.uniform(0, 0.5);
        inner.top -= rng.uniform(0, 0.5);
        if (inner.left >= inner.right || inner.bottom >= inner.top) continue;

        auto big = clip_polygon_to_rect(p, outer);
        auto small = clip_polygon_to_rect(p, inner);
        const double area_big = big ? polygon_area(*big) : 0.0;
        const double area_small = small ? polygon_area(*small) : 0.0;
        CHECK(area_small <= area_big + 1e-12);
    }
}

TEST_CASE("intersect_layer: one square inside one cell") {
    const GridSpec g = generate_grid(0, 10, 0, 10, 5.0);
    VectorLayer layer;
    layer.year = 2000;
    layer.polygons.push_back(fix_geometry(unit_square_at(1, 1)));
    const auto records = intersect_layer(layer, g);
    REQUIRE(records.size() == 1);
    CHECK(records[0].cell_id == 0);
    CHECK(records[0].year == 2000);
    CHECK(records[0].area == doctest::Approx(1.0));
    CHECK(records[0].perimeter == doctest::Approx(4.0));
}

TEST_CASE("intersect_layer: two disjoint squares in the same cell add up") {
    const GridSpec g = generate_grid(0, 10, 0, 10, 10.0);
    VectorLayer layer;
    layer.year = 1996;
    layer.polygons.push_back(fix_geometry(unit_square_at(1, 1)));
    layer.polygons.push_back(fix_geometry(unit_square_at(5, 5)));
    const auto records = intersect_layer(layer, g);
    REQUIRE(records.size() == 1);
    CHECK(records[0].area == doctest::Approx(2.0));
    CHECK(records[0].perimeter == doctest::Approx(8.0));
}

TEST_CASE("global partition invariant over 1000 random polygons") {
    Rng rng(808);
    const GridSpec g = generate_grid(-10, 10, -10, 10, 2.0);
    VectorLayer layer;
    layer.year = 1;
    double polygon_total = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Polygon p = fix_geometry(testutil::star_polygon(
            rng, rng.uniform(-8, 8), rng.uniform(-8, 8), 0.05, 0.9, 5 + i % 8));
        polygon_total += polygon_area(p);
        layer.polygons.push_back(std::move(p));
    }
    const auto records = intersect_layer(layer, g);
    double cell_total = 0.0;
    for (const auto& r : records) cell_total += r.area;
    CHECK(cell_total == doctest::Approx(polygon_total).epsilon(1e-9));
}

TEST_CASE("translation consistency") {
    Rng rng(55);
    // keep the polygons and the grid in lockstep under a common offset
    const double dx = 7.25;
    const double dy = -3.5;
    const GridSpec g0 = generate_grid(-5, 5, -5, 5, 1.25);
    const GridSpec g1 = generate_grid(-5 + dx, 5 + dx, -5 + dy, 5 + dy, 1.25);
    VectorLayer a, b;
    a.year = b.year = 9;
    for (int i = 0; i < 50; ++i) {
        Polygon p = fix_geometry(testutil::star_polygon(
            rng, rng.uniform(-4, 4), rng.uniform(-4, 4), 0.1, 0.8, 6 + i % 5));
        Polygon q = p;
        for (auto& v : q.outer.vertices) {
            v.lon += dx;
            v.lat += dy;
        }
        a.polygons.push_back(std::move(p));
        b.polygons.push_back(std::move(q));
    }
    const auto ra = intersect_layer(a, g0);
    const auto rb = intersect_layer(b, g1);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].cell_id == rb[i].cell_id);
        CHECK(ra[i].area == doctest::Approx(rb[i].area).epsilon(1e-12));
        CHECK(ra[i].perimeter == doctest::Approx(rb[i].perimeter).epsilon(1e-12));
    }
}

TEST_CASE("candidate pruning equals brute force exactly") {
    Rng rng(6001);
    for (int trial = 0; trial < 50; ++trial) {
        const GridSpec g = generate_grid(-6, 6, -6, 6, rng.uniform(0.8, 2.5));
        VectorLayer layer;
        layer.year = trial;
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            layer.polygons.push_back(fix_geometry(testutil::star_polygon(
                rng, rng.uniform(-5, 5), rng.uniform(-5, 5), 0.1, 1.5, 5 + i % 7)));
        }
        const auto indexed = intersect_layer(layer, g);
        const auto brute = brute_force_intersect(layer, g);
        REQUIRE(indexed.size() == brute.size());
        for (std::size_t i = 0; i < indexed.size(); ++i) {
            CHECK(indexed[i].cell_id == brute[i].cell_id);
            CHECK(indexed[i].area == brute[i].area);           // bit-exact
            CHECK(indexed[i].perimeter == brute[i].perimeter); // bit-exact
        }
    }
}

TEST_CASE("thread count does not change records") {
    Rng rng(424242);
    const GridSpec g = generate_grid(-10, 10, -10, 10, 1.0);
    VectorLayer layer;
    layer.year = 3;
    for (int i = 0; i < 500; ++i) {
        layer.polygons.push_back(fix_geometry(testutil::star_polygon(
            rng, rng.uniform(-9, 9), rng.uniform(-9, 9), 0.05, 1.2, 6)));
    }
    const auto one = intersect_layer(layer, g, 1);
    const auto four = intersect_layer(layer, g, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].area == four[i].area);
        CHECK(one[i].perimeter == four[i].perimeter);
    }
}

TEST_CASE("cell record csv round trip") {
    const GridSpec g = generate_grid(0, 2, 0, 2, 1.0);
    VectorLayer layer;
    layer.year = 2010;
    layer.polygons.push_back(fix_geometry(unit_square_at(0.2, 0.2)));
    const auto records = intersect_layer(layer, g);
    const auto parsed = records_from_csv(records_to_csv(records));
    REQUIRE(parsed.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(parsed[i].cell_id == records[i].cell_id);
        CHECK(parsed[i].area == records[i].area);
        CHECK(parsed[i].perimeter == records[i].perimeter);
    }
}
