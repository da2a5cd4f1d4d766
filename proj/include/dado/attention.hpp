#pragma once

#include <span>
#include <string_view>

#include "dado/raster.hpp"

namespace dado::attention {

/// Dispersion statistic used for the attention weight. Entropy is the default;
/// Hoyer is kept for sensitivity runs.
enum class SparsityMeasure { entropy, hoyer };

SparsityMeasure parse_sparsity_measure(std::string_view name);
std::string_view to_string(SparsityMeasure measure);

struct AttentionMap {
    Raster mask;            // values in [0,1]
    double sparsity = 1.0;  // in [0,1]
};

/// Per-pixel maximum over heads. All heads must share dimensions.
Raster aggregate_heads(std::span<const Raster> heads);

/// Min-max scaling to [0,1]; a constant raster maps to all zeros.
Raster normalize_unit(const Raster& raster);

/// Bilinear resampling with pixel-center alignment and edge clamping.
Raster resample_bilinear(const Raster& raster, int out_width, int out_height);

/// Normalized Shannon entropy H(p)/ln(N) of p = mask / sum(mask).
/// All-zero masks give 1; a single-pixel raster gives 0.
double attention_sparsity(const Raster& mask,
                          SparsityMeasure measure = SparsityMeasure::entropy);

}  // namespace dado::attention
