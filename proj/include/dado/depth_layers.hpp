#pragma once

#include <cstdint>
#include <vector>

#include "dado/raster.hpp"

namespace dado::depth {

struct DepthHistogram {
    int bin_count = 0;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
};

/// Value v lands in bin floor(v * bins); v = 1 goes to the last bin.
/// Expects depth already normalized to [0,1].
DepthHistogram depth_histogram(const Raster& depth, int bins);

/// Centered moving average with the window truncated at the edges, kept exact:
/// value(i) = scaled[i] / scale.
struct SmoothedHistogram {
    std::vector<std::int64_t> scaled;
    std::int64_t scale = 1;

    double value(std::size_t i) const {
        return static_cast<double>(scaled[i]) / static_cast<double>(scale);
    }
    std::size_t size() const { return scaled.size(); }
};

SmoothedHistogram smooth_histogram(const DepthHistogram& hist, int window);

struct Peak {
    int bin = 0;           // leftmost bin of the plateau
    int plateau_end = 0;   // rightmost bin of the plateau
    double prominence = 0; // in (smoothed) counts
};

struct PeakSearch {
    int bin_count = 0;
    SmoothedHistogram smoothed;
    std::vector<Peak> peaks;  // ascending bin
    bool fallback = false;    // no peak met the prominence bar; global maximum used
};

/// Prominence-filtered peaks of the smoothed histogram. The histogram is
/// treated as flanked by empty bins, so edge bins can be peaks and a side
/// without higher terrain bottoms out at zero.
PeakSearch find_peaks(const DepthHistogram& hist, double min_prominence_frac, int smooth_window = 3);

struct DepthLayer {
    double lo = 0.0;
    double hi = 1.0;
    Raster mask;  // 1 where lo <= depth <= hi, else 0
    int peak_bin = 0;
};

struct LayerSet {
    std::vector<DepthLayer> layers;     // foreground, nearest first
    std::vector<DepthLayer> discarded;  // background, nearest first

    std::size_t n() const { return layers.size(); }
};

/// One layer per peak. Base intervals meet at the deepest valley between
/// neighbouring peaks, then grow by overlap_frac of their own width per side.
LayerSet build_layers(const Raster& depth, const PeakSearch& peaks, double overlap_frac);

/// Equal-width intervals instead of histogram-driven ones.
LayerSet build_fixed_layers(const Raster& depth, int count, double overlap_frac);

/// Moves the n_discard farthest layers to `discarded`, keeping at least one.
LayerSet discard_background(LayerSet layers, int n_discard);

/// 1 / (1 + lambda * mean gradient magnitude). Central differences inside,
/// one-sided at the borders.
double depth_gradient_consistency(const Raster& depth, double lambda = 10.0);

}  // namespace dado::depth
