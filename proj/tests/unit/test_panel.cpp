#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coastcast/error.hpp"
#include "coastcast/panel.hpp"

#include "../helpers.hpp"

using namespace coastcast;

namespace {

CellYearRecord rec(long cell, int year, double area, double perim = 0.0,
                   double left = 0.0) {
    CellYearRecord r;
    r.cell_id = cell;
    r.year = year;
    r.left = left;
    r.right = left + 1.0;
    r.bottom = 0.0;
    r.top = 1.0;
    r.area = area;
    r.perimeter = perim;
    return r;
}

const CellYearRecord* find_row(const Panel& p, long cell, int year) {
    for (const auto& r : p.rows) {
        if (r.cell_id == cell && r.year == year) return &r;
    }
    return nullptr;
}

} // namespace

TEST_CASE("align_cells unions ids and zero-fills absent years") {
    const Panel p = align_cells({{rec(1, 1996, 2.0)}, {rec(2, 2016, 3.0, 0, 5.0)}});
    CHECK(p.observed_years == std::vector<int>{1996, 2016});
    CHECK(p.rows.size() == 4);
    const auto* a2016 = find_row(p, 1, 2016);
    REQUIRE(a2016 != nullptr);
    CHECK(a2016->area == 0.0);
    CHECK(a2016->perimeter == 0.0);
    CHECK(a2016->left == 0.0); // bounds copied from the 1996 row
    const auto* b1996 = find_row(p, 2, 1996);
    REQUIRE(b1996 != nullptr);
    CHECK(b1996->area == 0.0);
    CHECK(b1996->left == 5.0);
}

TEST_CASE("align_cells keeps identical single-cell inputs") {
    const Panel p = align_cells({{rec(7, 2000, 1.5, 8.0)}, {rec(7, 2001, 1.25, 7.0)}});
    CHECK(p.rows.size() == 2);
    CHECK(find_row(p, 7, 2000)->area == 1.5);
    CHECK(find_row(p, 7, 2001)->perimeter == 7.0);
}

TEST_CASE("align_cells rejects conflicting bounds") {
    CHECK(testutil::throws_errc(
        [] {
            align_cells({{rec(1, 2000, 1.0, 0, 0.0)}, {rec(1, 2001, 1.0, 0, 0.5)}});
        },
        errc::conflicting_cell_bounds));
}

TEST_CASE("interpolation hits the midpoint of a linear segment") {
    const Panel p = align_cells({{rec(1, 2000, 2.0)}, {rec(1, 2004, 6.0)}});
    const Panel full = interpolate_years(p);
    CHECK(full.rows.size() == 5);
    CHECK(find_row(full, 1, 2002)->area == doctest::Approx(4.0));
    CHECK(find_row(full, 1, 2001)->area == doctest::Approx(3.0));
    CHECK(find_row(full, 1, 2003)->area == doctest::Approx(5.0));
}

TEST_CASE("interpolation keeps a constant segment constant") {
    const Panel p = align_cells({{rec(1, 1996, 10.0)}, {rec(1, 2007, 10.0)}});
    const Panel full = interpolate_years(p);
    for (int y = 1996; y <= 2007; ++y) {
        CHECK(find_row(full, 1, y)->area == doctest::Approx(10.0));
    }
}

TEST_CASE("interpolation matches the closed-form piecewise-linear oracle") {
    // observed years with the archive's gap pattern, declining 1.5% per year
    // between observations
    const std::vector<int> years = {1996, 2007, 2008, 2009, 2010, 2015, 2016};
    std::vector<std::vector<CellYearRecord>> yearly;
    std::vector<double> observed_area;
    double area = 3.0;
    for (std::size_t k = 0; k < years.size(); ++k) {
        if (k > 0) {
            area *= std::pow(1.0 - 0.015, years[k] - years[k - 1]);
        }
        observed_area.push_back(area);
        yearly.push_back({rec(42, years[k], area)});
    }
    const Panel full = interpolate_years(align_cells(yearly));

    for (std::size_t k = 0; k + 1 < years.size(); ++k) {
        for (int y = years[k]; y <= years[k + 1]; ++y) {
            const double t = static_cast<double>(y - years[k]) /
                             static_cast<double>(years[k + 1] - years[k]);
            const double expected =
                observed_area[k] + t * (observed_area[k + 1] - observed_area[k]);
            const double actual = find_row(full, 42, y)->area;
            CHECK(actual == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    // observed rows are untouched bit-exactly
    for (std::size_t k = 0; k < years.size(); ++k) {
        CHECK(find_row(full, 42, years[k])->area == observed_area[k]);
    }

    // second differences vanish inside each gap
    for (std::size_t k = 0; k + 1 < years.size(); ++k) {
        for (int y = years[k] + 1; y + 1 <= years[k + 1]; ++y) {
            const double a0 = find_row(full, 42, y - 1)->area;
            const double a1 = find_row(full, 42, y)->area;
            const double a2 = find_row(full, 42, y + 1)->area;
            CHECK(std::fabs(a2 - 2 * a1 + a0) <= 1e-12);
        }
    }
}

TEST_CASE("interpolation requires at least two observed years") {
    const Panel p = align_cells({{rec(1, 2000, 1.0)}});
    CHECK(testutil::throws_errc([&] { interpolate_years(p); },
                                errc::single_observed_year));
}

TEST_CASE("zero-filled cells stay zero after interpolation") {
    const Panel p = align_cells({{rec(1, 2000, 2.0)},
                                 {rec(1, 2004, 1.0), rec(9, 2004, 0.0)}});
    const Panel full = interpolate_years(p);
    for (int y = 2000; y <= 2004; ++y) {
        CHECK(find_row(full, 9, y)->area == 0.0);
    }
}

TEST_CASE("build_supervised adds the lag target and drops the final year") {
    const Panel p = align_cells({{rec(3, 2015, 5.0)}, {rec(3, 2016, 4.0)}});
    const SupervisedTable t = build_supervised(p);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].year == 2015);
    CHECK(t.rows[0].area == 5.0);
    CHECK(t.rows[0].area_next == 4.0);
    CHECK(t.rows[0].lat_center == doctest::Approx(0.5));
    CHECK(t.rows[0].lon_center == doctest::Approx(0.5));
}

TEST_CASE("a 3-year panel of C cells yields 2C supervised rows") {
    std::vector<std::vector<CellYearRecord>> yearly(3);
    const int years[3] = {2000, 2001, 2002};
    for (int y = 0; y < 3; ++y) {
        for (long c = 0; c < 5; ++c) {
            yearly[static_cast<std::size_t>(y)].push_back(
                rec(c, years[y], 1.0 + c, 0, static_cast<double>(c) * 2));
        }
    }
    const SupervisedTable t = build_supervised(interpolate_years(align_cells(yearly)));
    CHECK(t.rows.size() == 10);
}

TEST_CASE("supervised join-back recovers the panel's next-year area") {
    std::vector<std::vector<CellYearRecord>> yearly;
    for (int y : {2000, 2003, 2004}) {
        std::vector<CellYearRecord> rows;
        for (long c = 0; c < 4; ++c) {
            rows.push_back(rec(c, y, 1.0 + 0.5 * c + 0.1 * y, 0,
                               static_cast<double>(c) * 3));
        }
        yearly.push_back(rows);
    }
    const Panel full = interpolate_years(align_cells(yearly));
    const SupervisedTable t = build_supervised(full);
    for (const auto& row : t.rows) {
        const auto* next = find_row(full, row.cell_id, row.year + 1);
        REQUIRE(next != nullptr);
        CHECK(row.area_next == next->area);
    }
}

TEST_CASE("panel and supervised csv round trips") {
    const Panel p = align_cells({{rec(1, 2000, 2.0, 6.0)}, {rec(1, 2002, 1.0, 4.0)}});
    const Panel full = interpolate_years(p);
    const Panel parsed = panel_from_csv(panel_to_csv(full), full.observed_years);
    REQUIRE(parsed.rows.size() == full.rows.size());
    for (std::size_t i = 0; i < full.rows.size(); ++i) {
        CHECK(parsed.rows[i].area == full.rows[i].area);
    }

    const SupervisedTable t = build_supervised(full);
    const SupervisedTable t2 = supervised_from_csv(supervised_to_csv(t));
    REQUIRE(t2.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t2.rows[i].area_next == t.rows[i].area_next);
        CHECK(t2.rows[i].lat_center == t.rows[i].lat_center);
    }
}
