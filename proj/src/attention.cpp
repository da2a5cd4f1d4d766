#include "dado/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dado::attention {

SparsityMeasure parse_sparsity_measure(std::string_view name) {
    if (name == "entropy") return SparsityMeasure::entropy;
    if (name == "hoyer") return SparsityMeasure::hoyer;
    throw ContractError("unknown sparsity measure '" + std::string(name) + "'");
}

std::string_view to_string(SparsityMeasure measure) {
    return measure == SparsityMeasure::entropy ? "entropy" : "hoyer";
}

Raster aggregate_heads(std::span<const Raster> heads) {
    if (heads.empty()) throw ContractError("aggregate_heads: no attention heads");
    Raster out = heads.front();
    for (std::size_t k = 1; k < heads.size(); ++k) {
        if (!heads[k].same_shape(out)) {
            throw ContractError("aggregate_heads: head " + std::to_string(k) + " is " +
                                std::to_string(heads[k].width()) + "x" +
                                std::to_string(heads[k].height()) + ", expected " +
                                std::to_string(out.width()) + "x" + std::to_string(out.height()));
        }
        auto dst = out.values();
        auto src = heads[k].values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
    }
    return out;
}

Raster normalize_unit(const Raster& raster) {
    const auto values = raster.values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    Raster out(raster.width(), raster.height(), 0.0f);
    if (*lo == *hi) return out;
    const double min = *lo;
    const double range = static_cast<double>(*hi) - min;
    auto dst = out.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        dst[i] = static_cast<float>((values[i] - min) / range);
    }
    return out;
}

Raster resample_bilinear(const Raster& raster, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1) {
        throw ContractError("resample_bilinear: output dimensions must be positive");
    }
    if (out_width == raster.width() && out_height == raster.height()) return raster;

    const double sx = static_cast<double>(raster.width()) / out_width;
    const double sy = static_cast<double>(raster.height()) / out_height;
    const auto source = [](int i, double scale, int extent, int& i0, int& i1, double& t) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(extent - 1));
        i0 = static_cast<int>(std::floor(s));
        i1 = std::min(i0 + 1, extent - 1);
        t = s - i0;
    };

    Raster out(out_width, out_height);
    for (int y = 0; y < out_height; ++y) {
        int y0, y1;
        double ty;
        source(y, sy, raster.height(), y0, y1, ty);
        for (int x = 0; x < out_width; ++x) {
            int x0, x1;
            double tx;
            source(x, sx, raster.width(), x0, x1, tx);
            const double top = raster.at(x0, y0) * (1.0 - tx) + raster.at(x1, y0) * tx;
            const double bottom = raster.at(x0, y1) * (1.0 - tx) + raster.at(x1, y1) * tx;
            out.at(x, y) = static_cast<float>(top * (1.0 - ty) + bottom * ty);
        }
    }
    return out;
}

namespace {

double entropy_sparsity(std::span<const float> values) {
    double total = 0.0;
    for (float v : values) total += v;
    if (total <= 0.0) return 1.0;
    if (values.size() == 1) return 0.0;
    double h = 0.0;
    for (float v : values) {
        if (v <= 0.0f) continue;
        const double p = v / total;
        h -= p * std::log(p);
    }
    return std::clamp(h / std::log(static_cast<double>(values.size())), 0.0, 1.0);
}

// 1 - Hoyer sparsity, so that larger still means more dispersed.
double hoyer_dispersion(std::span<const float> values) {
    double l1 = 0.0, l2 = 0.0;
    for (float v : values) {
        l1 += std::fabs(v);
        l2 += static_cast<double>(v) * v;
    }
    if (l2 <= 0.0) return 1.0;
    if (values.size() == 1) return 0.0;
    const double root_n = std::sqrt(static_cast<double>(values.size()));
    const double hoyer = (root_n - l1 / std::sqrt(l2)) / (root_n - 1.0);
    return std::clamp(1.0 - hoyer, 0.0, 1.0);
}

}  // namespace

double attention_sparsity(const Raster& mask, SparsityMeasure measure) {
    return measure == SparsityMeasure::entropy ? entropy_sparsity(mask.values())
                                               : hoyer_dispersion(mask.values());
}

}  // namespace dado::attention
