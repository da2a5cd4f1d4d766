#include "dado/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

namespace dado::png {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open PNG", path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed", path.string());
    }
    RgbImage image;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("invalid PNG " + path.string(), 0);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * static_cast<std::size_t>(height));
    rows.resize(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = buffer.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    image = RgbImage(width, height);
    for (int y = 0; y < height; ++y) {
        const png_byte* row = rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < width; ++x) image.at(x, y) = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
    return image;
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot open for writing", path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed", path.string());
    }
    std::vector<png_byte> row(static_cast<std::size_t>(image.width) * 3);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed", path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const Rgb& p = image.at(x, y);
            row[3 * static_cast<std::size_t>(x)] = p.r;
            row[3 * static_cast<std::size_t>(x) + 1] = p.g;
            row[3 * static_cast<std::size_t>(x) + 2] = p.b;
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

RgbImage render_gray(const Raster& raster) {
    const auto values = raster.values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = static_cast<double>(*hi) - *lo;
    RgbImage image(raster.width(), raster.height());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t = range > 0.0 ? (values[i] - *lo) / range : 0.0;
        const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
        image.pixels[i] = {g, g, g};
    }
    return image;
}

void draw_box(RgbImage& image, const Box& box, Rgb color) {
    const int x0 = std::max(box.xmin, 0);
    const int y0 = std::max(box.ymin, 0);
    const int x1 = std::min(box.xmax, image.width) - 1;
    const int y1 = std::min(box.ymax, image.height) - 1;
    if (x0 > x1 || y0 > y1) return;
    for (int x = x0; x <= x1; ++x) {
        image.at(x, y0) = color;
        image.at(x, y1) = color;
    }
    for (int y = y0; y <= y1; ++y) {
        image.at(x0, y) = color;
        image.at(x1, y) = color;
    }
}

}  // namespace dado::png
