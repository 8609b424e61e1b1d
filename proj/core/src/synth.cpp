#include "coastcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coastcast/error.hpp"
#include "coastcast/rng.hpp"

namespace coastcast {

namespace {

struct LatentFieldParams {
    double freq_lat, freq_lon, phase_lat, phase_lon, drift;
};

double latent(const LatentFieldParams& p, double lat, double lon, int year,
              int year0) {
    return std::sin(p.freq_lat * lat + p.phase_lat) *
               std::cos(p.freq_lon * lon + p.phase_lon) +
           p.drift * static_cast<double>(year - year0);
}

} // namespace

SynthWorld generate_synthetic_world(const SynthConfig& cfg) {
    if (cfg.observed_years.size() < 2) {
        raise(errc::bad_argument, "synth needs at least two observed years");
    }
    if (!std::is_sorted(cfg.observed_years.begin(), cfg.observed_years.end())) {
        raise(errc::bad_argument, "observed_years must be sorted");
    }

    SynthWorld world;
    world.grid = generate_grid(cfg.min_lon, cfg.max_lon, cfg.min_lat, cfg.max_lat,
                               cfg.cell_side);
    const std::size_t total_cells = world.grid.cell_count();
    if (cfg.n_cells > total_cells) {
        raise(errc::bad_argument, "n_cells exceeds the grid size");
    }

    Rng rng(cfg.seed);
    Rng cell_rng = rng.fork(1);
    Rng ecv_rng = rng.fork(2);
    Rng decline_rng = rng.fork(3);

    // distinct active cells
    std::vector<std::size_t> ids(total_cells);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    for (std::size_t i = 0; i < cfg.n_cells; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(cell_rng.below(total_cells - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(cfg.n_cells);
    std::sort(ids.begin(), ids.end());

    const int year0 = cfg.observed_years.front();
    const int year1 = cfg.observed_years.back();

    // latent thermal/haline fields drive the grouped ocean variables
    LatentFieldParams thermal{0.11, 0.07, ecv_rng.uniform(0, 6.28),
                              ecv_rng.uniform(0, 6.28), 0.01};
    LatentFieldParams haline{0.09, 0.13, ecv_rng.uniform(0, 6.28),
                             ecv_rng.uniform(0, 6.28), -0.008};

    // per-cell shape parameters and the simulated yearly area path
    struct CellState {
        Cell cell;
        double aspect;
        double jitter_x, jitter_y;
        std::vector<double> area_by_year; // index = year - year0
    };
    std::vector<CellState> cells;
    cells.reserve(cfg.n_cells);
    for (std::size_t id : ids) {
        CellState st;
        st.cell = cell_by_id(world.grid, static_cast<long>(id));
        const double cell_w = st.cell.right - st.cell.left;
        const double cell_h = st.cell.top - st.cell.bottom;
        const double cell_area = cell_w * cell_h;
        st.aspect = cell_rng.uniform(0.6, 1.6);
        const double area0 =
            cell_area * std::pow(10.0, cell_rng.uniform(-3.5, -1.5));

        const double lat_c = (st.cell.top + st.cell.bottom) / 2.0;
        const double lon_c = (st.cell.left + st.cell.right) / 2.0;

        st.area_by_year.resize(static_cast<std::size_t>(year1 - year0) + 1);
        st.area_by_year[0] = area0;
        for (int y = year0; y < year1; ++y) {
            const double s = latent(haline, lat_c, lon_c, y, year0);
            const double rate = cfg.decline_rate * (1.0 + cfg.ecv_coupling * s) +
                                decline_rng.normal(0.0, cfg.decline_noise_sd);
            const double next =
                st.area_by_year[static_cast<std::size_t>(y - year0)] *
                std::max(0.0, 1.0 - rate);
            st.area_by_year[static_cast<std::size_t>(y - year0) + 1] = next;
        }

        const double w0 = std::sqrt(area0 * st.aspect);
        const double h0 = std::sqrt(area0 / st.aspect);
        const double margin_x = (cell_w - w0) / 2.0;
        const double margin_y = (cell_h - h0) / 2.0;
        st.jitter_x = cell_rng.uniform(-0.9, 0.9) * std::max(0.0, margin_x);
        st.jitter_y = cell_rng.uniform(-0.9, 0.9) * std::max(0.0, margin_y);
        cells.push_back(std::move(st));
    }

    // polygon layers at observed years: one axis-aligned rectangle per cell
    for (int year : cfg.observed_years) {
        VectorLayer layer;
        layer.year = year;
        layer.polygons.reserve(cells.size());
        for (const CellState& st : cells) {
            const double area = st.area_by_year[static_cast<std::size_t>(year - year0)];
            if (area <= 0.0) continue;
            const double w = std::sqrt(area * st.aspect);
            const double h = std::sqrt(area / st.aspect);
            const double cx = (st.cell.left + st.cell.right) / 2.0 + st.jitter_x;
            const double cy = (st.cell.top + st.cell.bottom) / 2.0 + st.jitter_y;
            Polygon p;
            p.outer.vertices = {{cx - w / 2, cy - h / 2},
                                {cx + w / 2, cy - h / 2},
                                {cx + w / 2, cy + h / 2},
                                {cx - w / 2, cy + h / 2},
                                {cx - w / 2, cy - h / 2}};
            layer.polygons.push_back(std::move(p));
        }
        layer.source_bbox = {cfg.min_lon, cfg.min_lat, cfg.max_lon, cfg.max_lat};
        world.layers.push_back(std::move(layer));
    }

    // 1-degree ocean raster for every year in range
    std::vector<double> lat_centers, lon_centers;
    for (double lat = cfg.min_lat + 0.5; lat <= cfg.max_lat; lat += 1.0) {
        lat_centers.push_back(lat);
    }
    for (double lon = cfg.min_lon + 0.5; lon <= cfg.max_lon; lon += 1.0) {
        lon_centers.push_back(lon);
    }

    for (int year = year0; year <= year1; ++year) {
        EcvGrid grid;
        grid.year = year;
        grid.lat_centers = lat_centers;
        grid.lon_centers = lon_centers;
        const std::size_t n = grid.n_points();
        for (auto& ch : grid.values) ch.assign(n, 0.0);
        for (auto& ch : grid.known) ch.assign(n, 1);

        for (std::size_t i = 0; i < grid.n_lat(); ++i) {
            for (std::size_t j = 0; j < grid.n_lon(); ++j) {
                const std::size_t idx = grid.point_index(i, j);
                const double lat = lat_centers[i];
                const double lon = lon_centers[j];
                const double t = latent(thermal, lat, lon, year, year0) +
                                 ecv_rng.normal(0.0, 0.15);
                const double s = latent(haline, lat, lon, year, year0) +
                                 ecv_rng.normal(0.0, 0.15);
                grid.values[0][idx] = 10.0 + 3.0 * (0.9 * t + ecv_rng.normal(0.0, 0.1));
                grid.values[1][idx] = 35.0 + 0.5 * s;
                grid.values[2][idx] = 15.0 + 8.0 * t;
                grid.values[3][idx] = 30.0 * (0.85 * t + ecv_rng.normal(0.0, 0.1));
                grid.values[4][idx] = 20.0 * (0.85 * s + ecv_rng.normal(0.0, 0.1));
                grid.values[5][idx] = grid.values[3][idx] + grid.values[4][idx] +
                                      ecv_rng.normal(0.0, 1.0);
                for (std::size_t c = 0; c < kEcvChannels; ++c) {
                    // point 0 stays known so no channel is ever fully missing
                    if (idx != 0 && ecv_rng.uniform() < cfg.ecv_missing_frac) {
                        grid.known[c][idx] = 0;
                        grid.values[c][idx] =
                            std::numeric_limits<double>::quiet_NaN();
                    }
                }
            }
        }
        world.ecv_grids.push_back(std::move(grid));
    }
    return world;
}

} // namespace coastcast
