#pragma once

#include <string_view>
#include <vector>

#include "dado/attention.hpp"
#include "dado/depth_layers.hpp"
#include "dado/raster.hpp"

namespace dado::fusion {

struct FusionWeights {
    double cc = 0.0;
    double w_a = 0.5;
    double w_d = 0.5;
    bool gated = false;  // CC exceeded the threshold; both weights pinned to 0.5
};

enum class CombineMode { product, sum };

CombineMode parse_combine_mode(std::string_view name);
std::string_view to_string(CombineMode mode);

/// Mean of the elementwise product.
double cross_correlation(const Raster& att, const Raster& depth);

/// Both inputs normalized, same shape. Above the CC threshold the weights are
/// (0.5, 0.5); otherwise w_a = 1/(1+sparsity), w_d = depth gradient consistency.
FusionWeights compute_weights(const attention::AttentionMap& att, const Raster& depth,
                              double cc_threshold = 0.5, double lambda = 10.0);

/// product: w_a*att times w_d*mask. sum: clamp(w_a*att + w_d, 0, 1) on the
/// mask support, zero elsewhere.
Raster combine(const Raster& att, const Raster& layer_mask, const FusionWeights& weights,
               CombineMode mode = CombineMode::product);

/// (mean + population std) / 2 over every pixel.
double adaptive_threshold(const Raster& combined);
/// Same statistic restricted to pixels where support is nonzero.
double adaptive_threshold(const Raster& combined, const Raster& support);

/// 255 where value > tau, else 0.
Raster binarize(const Raster& combined, double tau);

struct CombinedLayer {
    Raster raw;
    double tau = 0.0;
    Raster binary;
    int layer_index = 0;  // 1-based
};

struct FuseOptions {
    CombineMode mode = CombineMode::product;
    bool tau_on_support = false;
};

/// One combined map per foreground layer, in layer order.
std::vector<CombinedLayer> fuse_image(const attention::AttentionMap& att,
                                      const depth::LayerSet& layers,
                                      const FusionWeights& weights,
                                      const FuseOptions& options = {});

}  // namespace dado::fusion
