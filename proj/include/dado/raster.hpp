#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dado/errors.hpp"

namespace dado {

/// Single-channel float image, row-major, top row first.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, float fill = 0.0f);
    Raster(int width, int height, std::vector<float> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    float& at(int x, int y) { return data_[index(x, y)]; }
    float at(int x, int y) const { return data_[index(x, y)]; }
    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    bool same_shape(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Throws ContractError unless both rasters have the same dimensions.
void require_same_shape(const Raster& a, const Raster& b, const std::string& context);

/// Axis-aligned pixel box, 0-based, half-open: [xmin, xmax) x [ymin, ymax).
struct Box {
    int xmin = 0;
    int ymin = 0;
    int xmax = 0;
    int ymax = 0;

    int width() const noexcept { return xmax - xmin; }
    int height() const noexcept { return ymax - ymin; }
    long long area() const noexcept {
        return static_cast<long long>(width()) * static_cast<long long>(height());
    }
    bool valid() const noexcept { return xmax > xmin && ymax > ymin; }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection over union using half-open pixel areas; 0 for disjoint boxes.
double iou(const Box& a, const Box& b);

struct GtObject {
    Box box;
    std::string label;
    bool difficult = false;

    friend bool operator==(const GtObject&, const GtObject&) = default;
};

struct GroundTruth {
    std::string stem;
    int image_width = 0;
    int image_height = 0;
    std::vector<GtObject> objects;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

}  // namespace dado
