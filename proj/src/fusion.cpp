#include "dado/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dado::fusion {

CombineMode parse_combine_mode(std::string_view name) {
    if (name == "product") return CombineMode::product;
    if (name == "sum") return CombineMode::sum;
    throw ContractError("unknown combine mode '" + std::string(name) + "'");
}

std::string_view to_string(CombineMode mode) {
    return mode == CombineMode::product ? "product" : "sum";
}

double cross_correlation(const Raster& att, const Raster& depth) {
    require_same_shape(att, depth, "cross_correlation");
    auto a = att.values();
    auto d = depth.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * d[i];
    return sum / static_cast<double>(a.size());
}

FusionWeights compute_weights(const attention::AttentionMap& att, const Raster& depth,
                              double cc_threshold, double lambda) {
    FusionWeights w;
    w.cc = cross_correlation(att.mask, depth);
    if (w.cc > cc_threshold) {
        w.w_a = 0.5;
        w.w_d = 0.5;
        w.gated = true;
        return w;
    }
    w.w_a = 1.0 / (1.0 + att.sparsity);
    w.w_d = depth::depth_gradient_consistency(depth, lambda);
    return w;
}

Raster combine(const Raster& att, const Raster& layer_mask, const FusionWeights& weights,
               CombineMode mode) {
    require_same_shape(att, layer_mask, "combine");
    Raster out(att.width(), att.height(), 0.0f);
    auto a = att.values();
    auto m = layer_mask.values();
    auto dst = out.values();
    if (mode == CombineMode::product) {
        const double gain = weights.w_a * weights.w_d;
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<float>(gain * (static_cast<double>(a[i]) * m[i]));
        }
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            if (m[i] == 0.0f) continue;
            const double v = weights.w_a * a[i] + weights.w_d * m[i];
            dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

namespace {

template <typename Keep>
double threshold_over(const Raster& combined, Keep keep) {
    auto v = combined.values();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!keep(i)) continue;
        sum += v[i];
        ++n;
    }
    if (n == 0) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!keep(i)) continue;
        const double d = v[i] - mean;
        sq += d * d;
    }
    return (mean + std::sqrt(sq / static_cast<double>(n))) / 2.0;
}

}  // namespace

double adaptive_threshold(const Raster& combined) {
    return threshold_over(combined, [](std::size_t) { return true; });
}

double adaptive_threshold(const Raster& combined, const Raster& support) {
    require_same_shape(combined, support, "adaptive_threshold");
    auto s = support.values();
    return threshold_over(combined, [&](std::size_t i) { return s[i] != 0.0f; });
}

Raster binarize(const Raster& combined, double tau) {
    Raster out(combined.width(), combined.height(), 0.0f);
    auto src = combined.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > tau ? 255.0f : 0.0f;
    return out;
}

std::vector<CombinedLayer> fuse_image(const attention::AttentionMap& att,
                                      const depth::LayerSet& layers,
                                      const FusionWeights& weights, const FuseOptions& options) {
    std::vector<CombinedLayer> out;
    out.reserve(layers.n());
    int index = 1;
    for (const auto& layer : layers.layers) {
        CombinedLayer c;
        c.layer_index = index++;
        if (options.mode == CombineMode::product) {
            // a positive gain cannot move pixels across the threshold; decide on the
            // unscaled map so the mask is exactly weight-independent
            const FusionWeights unit{weights.cc, 1.0, 1.0, weights.gated};
            const Raster base = combine(att.mask, layer.mask, unit, options.mode);
            const double base_tau = options.tau_on_support ? adaptive_threshold(base, layer.mask)
                                                           : adaptive_threshold(base);
            c.binary = binarize(base, base_tau);
            c.raw = combine(att.mask, layer.mask, weights, options.mode);
            c.tau = base_tau * weights.w_a * weights.w_d;
        } else {
            c.raw = combine(att.mask, layer.mask, weights, options.mode);
            c.tau = options.tau_on_support ? adaptive_threshold(c.raw, layer.mask)
                                           : adaptive_threshold(c.raw);
            c.binary = binarize(c.raw, c.tau);
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace dado::fusion
