#include "synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

namespace fs = std::filesystem;

namespace kpboost::synth {

namespace {

int draw(std::mt19937& rng, int lo, int hi) {  // inclusive
    return lo + int(rng() % uint32_t(hi - lo + 1));
}

uint8_t clamp_u8(int v) { return uint8_t(std::clamp(v, 0, 255)); }

}  // namespace

GrayImage flat(int w, int h, uint8_t value) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.assign(size_t(w) * h, value);
    return img;
}

GrayImage textured(int w, int h, uint32_t seed, int base, int amp, int cell) {
    std::mt19937 rng(seed);
    const int gw = w / cell + 2, gh = h / cell + 2;
    std::vector<int> grid(size_t(gw) * gh);
    for (int& v : grid) v = base + draw(rng, -amp, amp);

    GrayImage img = flat(w, h, 0);
    for (int y = 0; y < h; ++y) {
        const int gy = y / cell, fy = y % cell;
        for (int x = 0; x < w; ++x) {
            const int gx = x / cell, fx = x % cell;
            const int v00 = grid[gy * gw + gx], v10 = grid[gy * gw + gx + 1];
            const int v01 = grid[(gy + 1) * gw + gx], v11 = grid[(gy + 1) * gw + gx + 1];
            const int top = v00 * (cell - fx) + v10 * fx;
            const int bot = v01 * (cell - fx) + v11 * fx;
            img.pixels[size_t(y) * w + x] =
                clamp_u8((top * (cell - fy) + bot * fy) / (cell * cell));
        }
    }
    return img;
}

void add_pixel_noise(GrayImage& img, uint32_t seed, int amp) {
    std::mt19937 rng(seed);
    for (uint8_t& p : img.pixels) p = clamp_u8(int(p) + draw(rng, -amp, amp));
}

void fill_disc(GrayImage& img, int cx, int cy, int r, uint8_t value) {
    for (int y = std::max(0, cy - r); y <= std::min(img.height - 1, cy + r); ++y)
        for (int x = std::max(0, cx - r); x <= std::min(img.width - 1, cx + r); ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                img.pixels[size_t(y) * img.width + x] = value;
}

void fill_rect(GrayImage& img, int x, int y, int w, int h, uint8_t value) {
    for (int yy = std::max(0, y); yy < std::min(img.height, y + h); ++yy)
        for (int xx = std::max(0, x); xx < std::min(img.width, x + w); ++xx)
            img.pixels[size_t(yy) * img.width + xx] = value;
}

GrayImage blob(int w, int h, int cx, int cy, int r, uint8_t fg, uint8_t bg) {
    GrayImage img = flat(w, h, bg);
    fill_disc(img, cx, cy, r, fg);
    return img;
}

GrayImage car_positive(uint32_t seed) {
    std::mt19937 rng(seed);
    GrayImage img = textured(100, 40, rng(), 150 + draw(rng, -25, 25), 22);

    const int shift = draw(rng, -6, 6);
    const int body = 55 + draw(rng, -20, 20);
    const int wheel = 24 + draw(rng, -8, 8);

    // body slab with a roof, window band and bumpers
    fill_rect(img, 14 + shift, 14, 72, 14, clamp_u8(body));
    fill_rect(img, 32 + shift, 7, 36, 8, clamp_u8(body + 10));
    fill_rect(img, 36 + shift, 9, 12, 5, clamp_u8(body + 85));  // two windows
    fill_rect(img, 52 + shift, 9, 12, 5, clamp_u8(body + 85));
    fill_rect(img, 10 + shift, 22, 5, 5, clamp_u8(body + 60));  // head/tail lights
    fill_rect(img, 85 + shift, 22, 5, 5, clamp_u8(body + 60));
    fill_rect(img, 14 + shift, 25, 72, 3, clamp_u8(body - 18));  // side skirt
    // wheels: dark discs with a lighter hub
    const int r = 4 + draw(rng, 0, 3);
    const int wx0 = 27 + shift + draw(rng, -2, 2);
    const int wx1 = 73 + shift + draw(rng, -2, 2);
    fill_disc(img, wx0, 30, r, clamp_u8(wheel));
    fill_disc(img, wx1, 30, r, clamp_u8(wheel));
    fill_disc(img, wx0, 30, 2, clamp_u8(wheel + 80));
    fill_disc(img, wx1, 30, 2, clamp_u8(wheel + 80));
    // occasional partial occluder over one end of the car
    if (draw(rng, 0, 4) == 0)
        fill_rect(img, draw(rng, 0, 1) ? 4 : 84, 6, 12, 30, clamp_u8(140 + draw(rng, -30, 30)));

    add_pixel_noise(img, rng(), 8);
    return img;
}

GrayImage car_negative(uint32_t seed) {
    std::mt19937 rng(seed);
    GrayImage img = textured(100, 40, rng(), 150 + draw(rng, -25, 25), 22);

    // Clutter that shares texture statistics with positives but not the
    // full wheel/body arrangement: bars, slabs, stripes.
    const int pieces = draw(rng, 1, 4);
    for (int p = 0; p < pieces; ++p) {
        const int kind = draw(rng, 0, 2);
        const int shade = draw(rng, 0, 1) ? draw(rng, 20, 70) : draw(rng, 190, 240);
        if (kind == 0) {  // vertical bar
            fill_rect(img, draw(rng, 4, 90), draw(rng, 0, 10), draw(rng, 3, 7),
                      draw(rng, 18, 34), clamp_u8(shade));
        } else if (kind == 1) {  // horizontal slab
            fill_rect(img, draw(rng, 4, 50), draw(rng, 4, 30), draw(rng, 20, 45),
                      draw(rng, 4, 9), clamp_u8(shade));
        } else {  // diagonal stripe
            const int x0 = draw(rng, 0, 80), y0 = draw(rng, 0, 30);
            for (int t = 0; t < 28; ++t)
                fill_rect(img, x0 + t, y0 + t / 2, 2, 2, clamp_u8(shade));
        }
    }
    // decoys: isolated car parts at random places, so no lone presence
    // feature separates the classes
    const int decoys = draw(rng, 0, 2);
    for (int d = 0; d < decoys; ++d) {
        const int body = 55 + draw(rng, -20, 20);
        const int cx = draw(rng, 10, 84), cy = draw(rng, 8, 30);
        switch (draw(rng, 0, 4)) {
            case 0: {  // wheel with hub
                const int wheel = 24 + draw(rng, -8, 8);
                fill_disc(img, cx, std::min(cy + 10, 32), 4 + draw(rng, 0, 3),
                          clamp_u8(wheel));
                fill_disc(img, cx, std::min(cy + 10, 32), 2, clamp_u8(wheel + 80));
                break;
            }
            case 1:  // window on body patch
                fill_rect(img, cx - 3, cy - 2, 18, 9, clamp_u8(body));
                fill_rect(img, cx, cy, 12, 5, clamp_u8(body + 85));
                break;
            case 2:  // light square on body patch
                fill_rect(img, cx - 2, cy - 2, 9, 9, clamp_u8(body));
                fill_rect(img, cx, cy, 5, 5, clamp_u8(body + 60));
                break;
            case 3:  // skirt strip on body edge
                fill_rect(img, cx - 10, cy, 30, 6, clamp_u8(body));
                fill_rect(img, cx - 10, cy + 6, 30, 3, clamp_u8(body - 18));
                break;
            default:  // roof corner
                fill_rect(img, cx, cy, 20, 7, clamp_u8(body + 10));
                break;
        }
    }
    add_pixel_noise(img, rng(), 8);
    return img;
}

GrayImage pedestrian_positive(uint32_t seed) {
    std::mt19937 rng(seed);
    GrayImage img = textured(40, 80, rng(), 165 + draw(rng, -15, 15), 20);

    const int shift = draw(rng, -3, 3);
    const int shade = 48 + draw(rng, -18, 18);
    fill_disc(img, 20 + shift, 13 + draw(rng, -1, 1), 4 + draw(rng, 0, 1),
              clamp_u8(shade - 12));  // head
    fill_rect(img, 12 + shift, 20, 16, 24, clamp_u8(shade));                     // torso
    fill_rect(img, 12 + shift, 30, 16, 4, clamp_u8(shade + 70));                 // belt band
    fill_rect(img, 8 + shift, 22, 4, 16, clamp_u8(shade + 15));                  // arms
    fill_rect(img, 28 + shift, 22, 4, 16, clamp_u8(shade + 15));
    fill_rect(img, 13 + shift, 44, 6, 24, clamp_u8(shade + 8));  // legs
    fill_rect(img, 21 + shift, 44, 6, 24, clamp_u8(shade + 8));
    fill_rect(img, 12 + shift, 68, 8, 4, clamp_u8(shade - 8));  // feet
    fill_rect(img, 20 + shift, 68, 8, 4, clamp_u8(shade - 8));

    add_pixel_noise(img, rng(), 6);
    return img;
}

GrayImage pedestrian_negative(uint32_t seed) {
    std::mt19937 rng(seed);
    GrayImage img = textured(40, 80, rng(), 165 + draw(rng, -15, 15), 20);
    const int pieces = draw(rng, 2, 5);
    for (int p = 0; p < pieces; ++p) {
        const int shade = draw(rng, 0, 1) ? draw(rng, 25, 75) : draw(rng, 190, 235);
        const int kind = draw(rng, 0, 2);
        if (kind == 0)
            fill_rect(img, draw(rng, 0, 24), draw(rng, 0, 60), draw(rng, 8, 24),
                      draw(rng, 4, 10), clamp_u8(shade));
        else if (kind == 1)
            fill_rect(img, draw(rng, 0, 32), draw(rng, 0, 30), draw(rng, 3, 6),
                      draw(rng, 20, 45), clamp_u8(shade));
        else {
            const int x0 = draw(rng, 0, 30), y0 = draw(rng, 0, 50);
            for (int t = 0; t < 22; ++t)
                fill_rect(img, x0 + t / 2, y0 + t, 2, 2, clamp_u8(shade));
        }
    }
    // decoy: head-like disc without the figure below it
    if (draw(rng, 0, 99) < 30) {
        const int shade = 48 + draw(rng, -18, 18);
        fill_disc(img, draw(rng, 8, 32), draw(rng, 8, 60), 4 + draw(rng, 0, 1),
                  clamp_u8(shade - 12));
    }
    add_pixel_noise(img, rng(), 6);
    return img;
}

DatasetManifest write_dataset(const std::string& dir, Category cat, int n_pos, int n_neg,
                              uint32_t seed) {
    fs::create_directories(dir);
    DatasetManifest m;
    char name[64];
    for (int i = 0; i < n_pos; ++i) {
        GrayImage img = cat == Category::car ? car_positive(seed + 2 * i)
                                             : pedestrian_positive(seed + 2 * i);
        std::snprintf(name, sizeof name, "pos_%04d.pgm", i);
        const std::string path = (fs::path(dir) / name).string();
        save_pgm(img, path);
        m.entries.push_back({path, 1, Split::unassigned});
    }
    for (int i = 0; i < n_neg; ++i) {
        GrayImage img = cat == Category::car ? car_negative(seed + 2 * i + 1)
                                             : pedestrian_negative(seed + 2 * i + 1);
        std::snprintf(name, sizeof name, "neg_%04d.pgm", i);
        const std::string path = (fs::path(dir) / name).string();
        save_pgm(img, path);
        m.entries.push_back({path, 0, Split::unassigned});
    }
    return m;
}

void write_sequence(const std::string& dir, int frames, int width, int height, uint32_t seed) {
    fs::create_directories(dir);
    std::mt19937 rng(seed);
    const uint32_t bg_seed = rng();
    char name[64];
    for (int f = 0; f < frames; ++f) {
        GrayImage img = textured(width, height, bg_seed, 170, 22);
        // fixed scene clutter
        fill_rect(img, width / 8, height / 3, 6, height / 3, 60);
        fill_rect(img, 5 * width / 8, height / 6, width / 5, 8, 80);
        // car-like object sliding left to right
        const int cx = 20 + (f * (width - 140)) / std::max(1, frames - 1);
        const int cy = height / 2;
        fill_rect(img, cx, cy - 8, 72, 14, 55);
        fill_rect(img, cx + 18, cy - 15, 36, 8, 65);
        fill_disc(img, cx + 13, cy + 8, 6, 25);
        fill_disc(img, cx + 59, cy + 8, 6, 25);
        add_pixel_noise(img, seed + 1000u + uint32_t(f), 5);
        std::snprintf(name, sizeof name, "frame_%04d.pgm", f);
        save_pgm(img, (fs::path(dir) / name).string());
    }
}

}  // namespace kpboost::synth
