#pragma once

#include <cstdint>
#include <vector>

#include "coastcast/ecv.hpp"
#include "coastcast/grid.hpp"

namespace coastcast {

// Desk-scale synthetic world: polygon layers for a handful of observed
// years with a gap pattern like the real archive, areas declining a few
// percent per year, and a 1-degree ocean-variable raster with grouped
// correlations (temperature/heat/thermosteric and salinity/halosteric).
struct SynthConfig {
    double min_lon = -80.0, max_lon = 80.0;
    double min_lat = -25.0, max_lat = 25.0;
    double cell_side = kDefaultCellSide;
    std::size_t n_cells = 5000;
    std::vector<int> observed_years = {2000, 2007, 2008, 2009, 2010, 2019, 2020};
    double decline_rate = 0.015;     // mean fractional yearly loss
    double decline_noise_sd = 0.003; // per cell-year jitter on the rate
    double ecv_coupling = 0.1;       // decline sensitivity to the haline field
    double ecv_missing_frac = 0.05;  // missing-at-random mask fraction
    std::uint64_t seed = 0;
};

struct SynthWorld {
    GridSpec grid;
    std::vector<VectorLayer> layers;  // one per observed year
    std::vector<EcvGrid> ecv_grids;   // one per year, first..last observed
};

SynthWorld generate_synthetic_world(const SynthConfig& config);

} // namespace coastcast
