#include "kpboost/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace kpboost {

IntegralImage integral(const GrayImage& img) {
    IntegralImage ii;
    ii.width = img.width;
    ii.height = img.height;
    const int w1 = img.width + 1;
    ii.table.assign(size_t(w1) * (img.height + 1), 0);
    for (int y = 0; y < img.height; ++y) {
        int64_t row_sum = 0;
        const uint8_t* row = &img.pixels[size_t(y) * img.width];
        const int64_t* above = &ii.table[size_t(y) * w1];
        int64_t* out = &ii.table[size_t(y + 1) * w1];
        for (int x = 0; x < img.width; ++x) {
            row_sum += row[x];
            out[x + 1] = above[x + 1] + row_sum;
        }
    }
    return ii;
}

int64_t box_sum(const IntegralImage& ii, int x0, int y0, int w, int h) {
    if (w <= 0 || h <= 0) return 0;
    int x1 = x0 + w;
    int y1 = y0 + h;
    if (x0 < 0) x0 = 0;
    if (y0 < 0) y0 = 0;
    if (x1 > ii.width) x1 = ii.width;
    if (y1 > ii.height) y1 = ii.height;
    if (x0 >= x1 || y0 >= y1) return 0;
    return ii.at(x1, y1) - ii.at(x0, y1) - ii.at(x1, y0) + ii.at(x0, y0);
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

// Skips PGM whitespace and '#' comment lines, then parses one decimal token.
int read_pgm_int(std::FILE* f, const std::string& path) {
    int c = std::fgetc(f);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
        } else if (!std::isspace(c)) {
            break;
        }
        c = std::fgetc(f);
    }
    if (c == EOF) fail(path, "unexpected end of file");
    if (!std::isdigit(c)) fail(path, "malformed PGM header");
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1'000'000'000) fail(path, "malformed PGM header");
        c = std::fgetc(f);
    }
    return int(v);
}

GrayImage load_pgm(std::FILE* f, const std::string& path) {
    GrayImage img;
    img.width = read_pgm_int(f, path);
    img.height = read_pgm_int(f, path);
    int maxval = read_pgm_int(f, path);
    if (img.width < 1 || img.height < 1) fail(path, "zero-dimension image");
    if (maxval < 1 || maxval > 255) fail(path, "unsupported PGM maxval");
    // Exactly one whitespace byte separates the header from the payload;
    // read_pgm_int already consumed it.
    img.pixels.resize(size_t(img.width) * img.height);
    size_t got = std::fread(img.pixels.data(), 1, img.pixels.size(), f);
    if (got != img.pixels.size()) fail(path, "unexpected end of file");
    return img;
}

GrayImage load_png(std::FILE* f, const std::string& path) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "libpng init failed");
    }
    std::vector<uint8_t> interleaved;
    int channels = 0;
    GrayImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt PNG");
    }
    png_init_io(png, f);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);
    if (w < 1 || h < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "zero-dimension image");
    }
    if (depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported format: 16-bit PNG");
    }
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported format: PNG must be 8-bit gray or RGB");
    }
    interleaved.resize(size_t(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = interleaved.data() + size_t(y) * w * channels;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    img.width = int(w);
    img.height = int(h);
    img.pixels.resize(size_t(w) * h);
    if (channels == 1) {
        img.pixels.assign(interleaved.begin(), interleaved.end());
    } else {
        for (size_t i = 0; i < img.pixels.size(); ++i) {
            const uint8_t* p = &interleaved[i * 3];
            // integer-rounded ITU-R BT.601 luma
            img.pixels[i] =
                uint8_t((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
        }
    }
    return img;
}

}  // namespace

GrayImage load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) fail(path, "unreadable file");
    unsigned char sig[2] = {0, 0};
    if (std::fread(sig, 1, 2, f.get()) != 2) fail(path, "unexpected end of file");
    std::rewind(f.get());
    if (sig[0] == 'P' && sig[1] == '5') {
        std::fgetc(f.get());
        std::fgetc(f.get());
        return load_pgm(f.get(), path);
    }
    if (sig[0] == 'P' && sig[1] == '2')
        fail(path, "unsupported format: ASCII PGM (P2)");
    if (sig[0] == 0x89 && sig[1] == 'P') return load_png(f.get(), path);
    fail(path, "unsupported format");
}

void save_pgm(const GrayImage& img, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) fail(path, "cannot open for writing");
    std::fprintf(f.get(), "P5\n%d %d\n255\n", img.width, img.height);
    if (std::fwrite(img.pixels.data(), 1, img.pixels.size(), f.get()) !=
        img.pixels.size())
        fail(path, "short write");
}

}  // namespace kpboost
