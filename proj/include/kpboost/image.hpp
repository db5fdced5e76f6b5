#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kpboost {

// 8-bit grayscale raster, row-major. Immutable after construction.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;

    uint8_t at(int x, int y) const { return pixels[size_t(y) * width + x]; }
    bool valid() const {
        return width >= 1 && height >= 1 &&
               pixels.size() == size_t(width) * size_t(height);
    }
};

// Cumulative-sum table of size (width+1) x (height+1).
// S(x, y) = sum of pixels in [0,x) x [0,y). 64-bit entries, no overflow
// for any desk-scale image (255 * 10^6 fits in 40 bits).
struct IntegralImage {
    int width = 0;   // source image width
    int height = 0;  // source image height
    std::vector<int64_t> table;

    int64_t at(int x, int y) const { return table[size_t(y) * (width + 1) + x]; }
};

IntegralImage integral(const GrayImage& img);

// Exact pixel sum over the rectangle [x0, x0+w) x [y0, y0+h), clipped to
// image bounds. Out-of-bounds area contributes zero; w <= 0 or h <= 0
// yields zero.
int64_t box_sum(const IntegralImage& ii, int x0, int y0, int w, int h);

// Reads a binary PGM (P5, maxval <= 255) or an 8-bit gray/RGB PNG.
// RGB is converted to luminance with integer-rounded BT.601 weights.
// Throws std::runtime_error on unreadable files, unsupported formats and
// zero-dimension images.
GrayImage load_image(const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);

}  // namespace kpboost
