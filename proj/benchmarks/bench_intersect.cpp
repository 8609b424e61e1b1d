#include <benchmark/benchmark.h>

#include "coastcast/grid.hpp"
#include "coastcast/rng.hpp"

#include "../tests/helpers.hpp"

using namespace coastcast;

namespace {

VectorLayer make_layer(std::size_t n_polygons) {
    Rng rng(42);
    VectorLayer layer;
    layer.year = 2016;
    layer.polygons.reserve(n_polygons);
    for (std::size_t i = 0; i < n_polygons; ++i) {
        const double cx = rng.uniform(kDefaultBounds[0] + 0.5, kDefaultBounds[1] - 0.5);
        const double cy = rng.uniform(kDefaultBounds[2] + 0.5, kDefaultBounds[3] - 0.5);
        layer.polygons.push_back(
            fix_geometry(testutil::star_polygon(rng, cx, cy, 0.01, 0.12, 8)));
    }
    return layer;
}

const GridSpec kGrid = generate_grid(kDefaultBounds[0], kDefaultBounds[1],
                                     kDefaultBounds[2], kDefaultBounds[3],
                                     kDefaultCellSide);

} // namespace

static void IntersectLayerSerial(benchmark::State& state) {
    const VectorLayer layer = make_layer(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto records = intersect_layer(layer, kGrid, 1);
        benchmark::DoNotOptimize(records);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(IntersectLayerSerial)->RangeMultiplier(4)->Range(1000, 64000);

static void IntersectLayerThreaded(benchmark::State& state) {
    const VectorLayer layer = make_layer(64000);
    for (auto _ : state) {
        auto records = intersect_layer(layer, kGrid,
                                       static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(records);
    }
}
BENCHMARK(IntersectLayerThreaded)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

static void ClipPolygonToRect(benchmark::State& state) {
    Rng rng(7);
    const Polygon poly = fix_geometry(testutil::star_polygon(rng, 0.0, 0.0, 0.4, 1.4,
                                                             static_cast<std::size_t>(
                                                                 state.range(0))));
    const Cell cell{0, -0.5, 0.9, 0.8, -0.6};
    for (auto _ : state) {
        auto clipped = clip_polygon_to_rect(poly, cell);
        benchmark::DoNotOptimize(clipped);
    }
}
BENCHMARK(ClipPolygonToRect)->Arg(8)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
