#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dado/raster.hpp"

namespace dado::png {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;  // row-major

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h) {}

    Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Any PNG colour type, converted to 8-bit RGB.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const RgbImage& image, const std::filesystem::path& path);

/// Min-max scaled grayscale rendering.
RgbImage render_gray(const Raster& raster);

/// One-pixel outline along the box's edge pixels, clipped to the image.
void draw_box(RgbImage& image, const Box& box, Rgb color);

}  // namespace dado::png
