#include "dado/raster.hpp"

#include <algorithm>

namespace dado {

namespace {

std::size_t checked_count(int width, int height) {
    if (width < 1 || height < 1) {
        throw ContractError("raster dimensions must be positive, got " + std::to_string(width) +
                            "x" + std::to_string(height));
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Raster::Raster(int width, int height, float fill)
    : width_(width), height_(height), data_(checked_count(width, height), fill) {}

Raster::Raster(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_count(width, height)) {
        throw ContractError("raster data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
    }
}

void require_same_shape(const Raster& a, const Raster& b, const std::string& context) {
    if (!a.same_shape(b)) {
        throw ContractError(context + ": dimension mismatch " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                            "x" + std::to_string(b.height()));
    }
}

double iou(const Box& a, const Box& b) {
    const long long iw = std::max(0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
    const long long ih = std::max(0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
    const long long inter = iw * ih;
    if (inter == 0) return 0.0;
    const long long uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace dado
