#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dado/fusion.hpp"
#include "dado/raster.hpp"

namespace dado::boxes {

using dado::iou;

struct Detection {
    Box box;
    double score = 0.0;
    int layer_index = 0;
    std::size_t component_area = 0;
};

/// Orders by score descending, then by box corner, then by layer.
bool ranks_before(const Detection& a, const Detection& b);

struct DetectionSet {
    std::string stem;
    std::vector<Detection> detections;  // ranks_before order
};

/// Square-window erosion/dilation on a {0,255} raster. Pixels outside the
/// image are ignored, so the border neither grows nor eats objects.
Raster erode(const Raster& binary, int kernel);
Raster dilate(const Raster& binary, int kernel);

enum class CleanOrder { close_then_open, open_then_close };

/// Closing then opening (by default) with a kernel x kernel square.
Raster morph_clean(const Raster& binary, int kernel,
                   CleanOrder order = CleanOrder::close_then_open);

struct Component {
    Box box;
    std::vector<std::size_t> pixels;  // row-major indices, ascending
};

/// 8-connected foreground components with area >= min_area_frac * W * H,
/// ordered by (ymin, xmin).
std::vector<Component> connected_components(const Raster& binary, double min_area_frac);

/// Mean of raw over the component pixels.
double score_box(const Raster& raw, const Component& component);

/// Gaussian Soft-NMS: each pick decays the rest by exp(-iou^2 / sigma).
/// Detections falling below score_floor are dropped.
DetectionSet soft_nms(DetectionSet dets, double sigma = 0.5, double score_floor = 0.001);

struct ExtractOptions {
    int kernel = 3;
    CleanOrder order = CleanOrder::close_then_open;
    double min_area_frac = 0.001;
    double nms_sigma = 0.5;
    double score_floor = 0.001;
};

DetectionSet extract_detections(const std::vector<fusion::CombinedLayer>& layers,
                                const ExtractOptions& options = {}, std::string stem = {});

}  // namespace dado::boxes
