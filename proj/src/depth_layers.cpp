#include "dado/depth_layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dado::depth {

DepthHistogram depth_histogram(const Raster& depth, int bins) {
    if (bins < 2) throw ContractError("depth_histogram: need at least 2 bins");
    DepthHistogram hist{bins, std::vector<std::int64_t>(static_cast<std::size_t>(bins), 0), 0};
    for (float v : depth.values()) {
        int bin = static_cast<int>(std::floor(static_cast<double>(v) * bins));
        bin = std::clamp(bin, 0, bins - 1);
        ++hist.counts[static_cast<std::size_t>(bin)];
    }
    hist.total = static_cast<std::int64_t>(depth.size());
    return hist;
}

SmoothedHistogram smooth_histogram(const DepthHistogram& hist, int window) {
    if (window < 1 || window % 2 == 0 || window > 15) {
        throw ContractError("smoothing window must be odd and in [1,15], got " +
                            std::to_string(window));
    }
    const int bins = static_cast<int>(hist.counts.size());
    const int half = window / 2;
    std::vector<int> width(static_cast<std::size_t>(bins));
    std::int64_t scale = 1;
    for (int i = 0; i < bins; ++i) {
        width[static_cast<std::size_t>(i)] = std::min(i + half, bins - 1) - std::max(i - half, 0) + 1;
        scale = std::lcm(scale, static_cast<std::int64_t>(width[static_cast<std::size_t>(i)]));
    }
    SmoothedHistogram out{std::vector<std::int64_t>(static_cast<std::size_t>(bins)), scale};
    for (int i = 0; i < bins; ++i) {
        std::int64_t sum = 0;
        for (int k = std::max(i - half, 0); k <= std::min(i + half, bins - 1); ++k) {
            sum += hist.counts[static_cast<std::size_t>(k)];
        }
        out.scaled[static_cast<std::size_t>(i)] = sum * (scale / width[static_cast<std::size_t>(i)]);
    }
    return out;
}

namespace {

// Lowest point reached walking from the plateau toward `step` until a bar
// higher than the peak or the (zero-valued) outside of the histogram.
std::int64_t side_valley(const std::vector<std::int64_t>& s, int from, int step, std::int64_t height) {
    std::int64_t lowest = height;
    for (int k = from; k >= 0 && k < static_cast<int>(s.size()); k += step) {
        if (s[static_cast<std::size_t>(k)] > height) return lowest;
        lowest = std::min(lowest, s[static_cast<std::size_t>(k)]);
    }
    return 0;
}

}  // namespace

PeakSearch find_peaks(const DepthHistogram& hist, double min_prominence_frac, int smooth_window) {
    PeakSearch result;
    result.bin_count = hist.bin_count;
    result.smoothed = smooth_histogram(hist, smooth_window);
    const auto& s = result.smoothed.scaled;
    const int bins = static_cast<int>(s.size());

    const auto at = [&](int i) -> std::int64_t {
        return (i < 0 || i >= bins) ? 0 : s[static_cast<std::size_t>(i)];
    };
    const auto prominence_of = [&](int first, int last) {
        const std::int64_t h = s[static_cast<std::size_t>(first)];
        const std::int64_t valley = std::max(side_valley(s, first - 1, -1, h),
                                             side_valley(s, last + 1, +1, h));
        return h - valley;
    };

    // the bar is frac * total in counts; comparing in scaled units keeps it exact
    const double bar_counts = min_prominence_frac * static_cast<double>(hist.total);
    const long double bar = static_cast<long double>(bar_counts) *
                            static_cast<long double>(result.smoothed.scale);
    const double to_counts = 1.0 / static_cast<double>(result.smoothed.scale);

    for (int i = 0; i < bins;) {
        int j = i;
        while (j + 1 < bins && s[static_cast<std::size_t>(j + 1)] == s[static_cast<std::size_t>(i)]) ++j;
        const std::int64_t h = s[static_cast<std::size_t>(i)];
        if (h > at(i - 1) && h > at(j + 1)) {
            const std::int64_t prom = prominence_of(i, j);
            if (static_cast<long double>(prom) >= bar) {
                result.peaks.push_back({i, j, static_cast<double>(prom) * to_counts});
            }
        }
        i = j + 1;
    }

    if (result.peaks.empty()) {
        const int top = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
        int end = top;
        while (end + 1 < bins && s[static_cast<std::size_t>(end + 1)] == s[static_cast<std::size_t>(top)]) ++end;
        result.peaks.push_back({top, end, static_cast<double>(prominence_of(top, end)) * to_counts});
        result.fallback = true;
    }
    return result;
}

namespace {

Raster interval_mask(const Raster& depth, double lo, double hi) {
    Raster mask(depth.width(), depth.height(), 0.0f);
    auto src = depth.values();
    auto dst = mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = (src[i] >= lo && src[i] <= hi) ? 1.0f : 0.0f;
    }
    return mask;
}

void check_overlap(double overlap_frac) {
    if (!(overlap_frac >= 0.0 && overlap_frac < 0.5)) {
        throw ContractError("overlap_frac must be in [0, 0.5), got " + std::to_string(overlap_frac));
    }
}

LayerSet layers_from_bounds(const Raster& depth, const std::vector<double>& bounds,
                            const std::vector<int>& peak_bins, double overlap_frac) {
    LayerSet set;
    // bounds ascend, so walk backwards to list the nearest layer first
    for (std::size_t k = peak_bins.size(); k-- > 0;) {
        const double lo = bounds[k];
        const double hi = bounds[k + 1];
        const double grow = overlap_frac * (hi - lo);
        DepthLayer layer;
        layer.lo = std::max(0.0, lo - grow);
        layer.hi = std::min(1.0, hi + grow);
        layer.peak_bin = peak_bins[k];
        layer.mask = interval_mask(depth, layer.lo, layer.hi);
        set.layers.push_back(std::move(layer));
    }
    return set;
}

}  // namespace

LayerSet build_layers(const Raster& depth, const PeakSearch& search, double overlap_frac) {
    check_overlap(overlap_frac);
    if (search.peaks.empty()) throw ContractError("build_layers: no peaks");
    const auto& s = search.smoothed.scaled;
    const double bins = static_cast<double>(search.bin_count);

    std::vector<double> bounds{0.0};
    std::vector<int> peak_bins;
    for (std::size_t k = 0; k < search.peaks.size(); ++k) {
        peak_bins.push_back(search.peaks[k].bin);
        if (k + 1 == search.peaks.size()) break;
        const int from = search.peaks[k].plateau_end + 1;
        const int to = search.peaks[k + 1].bin - 1;
        if (from > to) throw ContractError("build_layers: peaks are not separated by a valley");
        const auto first = std::min_element(s.begin() + from, s.begin() + to + 1);
        const std::int64_t low = *first;
        int a = static_cast<int>(first - s.begin());
        int b = a;
        for (int i = a; i <= to; ++i) {
            if (s[static_cast<std::size_t>(i)] == low) b = i;
        }
        // centre of the span of minimal bins, in nearness units
        bounds.push_back((a + b + 1) / (2.0 * bins));
    }
    bounds.push_back(1.0);
    return layers_from_bounds(depth, bounds, peak_bins, overlap_frac);
}

LayerSet build_fixed_layers(const Raster& depth, int count, double overlap_frac) {
    check_overlap(overlap_frac);
    if (count < 1) throw ContractError("build_fixed_layers: count must be positive");
    std::vector<double> bounds;
    std::vector<int> ids;
    for (int i = 0; i <= count; ++i) bounds.push_back(static_cast<double>(i) / count);
    for (int i = 0; i < count; ++i) ids.push_back(i);
    return layers_from_bounds(depth, bounds, ids, overlap_frac);
}

LayerSet discard_background(LayerSet set, int n_discard) {
    if (n_discard < 0) throw ContractError("discard_background: n_discard must be >= 0");
    std::size_t drop = std::min<std::size_t>(static_cast<std::size_t>(n_discard),
                                             set.layers.empty() ? 0 : set.layers.size() - 1);
    // farthest layers sit at the back
    std::vector<DepthLayer> dropped(std::make_move_iterator(set.layers.end() - static_cast<std::ptrdiff_t>(drop)),
                                    std::make_move_iterator(set.layers.end()));
    set.layers.resize(set.layers.size() - drop);
    set.discarded.insert(set.discarded.begin(), std::make_move_iterator(dropped.begin()),
                         std::make_move_iterator(dropped.end()));
    return set;
}

double depth_gradient_consistency(const Raster& depth, double lambda) {
    const int w = depth.width();
    const int h = depth.height();
    const auto diff = [](float lo, float hi, double span) { return (static_cast<double>(hi) - lo) / span; };
    double total = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = 0.0, gy = 0.0;
            if (w > 1) {
                if (x == 0) gx = diff(depth.at(0, y), depth.at(1, y), 1.0);
                else if (x == w - 1) gx = diff(depth.at(w - 2, y), depth.at(w - 1, y), 1.0);
                else gx = diff(depth.at(x - 1, y), depth.at(x + 1, y), 2.0);
            }
            if (h > 1) {
                if (y == 0) gy = diff(depth.at(x, 0), depth.at(x, 1), 1.0);
                else if (y == h - 1) gy = diff(depth.at(x, h - 2), depth.at(x, h - 1), 1.0);
                else gy = diff(depth.at(x, y - 1), depth.at(x, y + 1), 2.0);
            }
            total += std::sqrt(gx * gx + gy * gy);
        }
    }
    const double mean = total / static_cast<double>(depth.size());
    return 1.0 / (1.0 + lambda * mean);
}

}  // namespace dado::depth
