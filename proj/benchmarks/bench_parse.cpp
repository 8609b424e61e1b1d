#include <benchmark/benchmark.h>

#include "coastcast/shapefile.hpp"
#include "coastcast/wkt.hpp"

#include "../tests/helpers.hpp"

using namespace coastcast;

namespace {

std::vector<unsigned char> make_shp(std::size_t n_records) {
    testutil::ShpBuilder b;
    coastcast::Rng rng(3);
    for (std::size_t i = 0; i < n_records; ++i) {
        const double x = rng.uniform(-170, 170);
        const double y = rng.uniform(-80, 80);
        b.add_polygon_record({{{x, y}, {x + 0.2, y}, {x + 0.2, y + 0.1},
                               {x, y + 0.1}, {x, y}}},
                             static_cast<std::int32_t>(i + 1));
    }
    return b.finish();
}

} // namespace

static void ParseShapefile(benchmark::State& state) {
    const auto bytes = make_shp(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto layer = parse_shapefile(bytes);
        benchmark::DoNotOptimize(layer);
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(ParseShapefile)->RangeMultiplier(8)->Range(100, 51200);

static void ParseWktPolygon(benchmark::State& state) {
    coastcast::Rng rng(9);
    const Polygon p = fix_geometry(testutil::star_polygon(
        rng, 0, 0, 0.5, 2.0, static_cast<std::size_t>(state.range(0))));
    const std::string text = to_wkt(p);
    for (auto _ : state) {
        auto parsed = parse_wkt(text);
        benchmark::DoNotOptimize(parsed);
    }
}
BENCHMARK(ParseWktPolygon)->Arg(16)->Arg(256);

BENCHMARK_MAIN();
