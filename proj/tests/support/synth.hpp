#pragma once

// Deterministic synthetic imagery for tests, benchmarks and demo runs:
// textured backgrounds, blob targets, car-like and pedestrian-like
// categories, and frame sequences. Everything is seeded; identical seeds
// give identical images.

#include <cstdint>
#include <string>

#include "kpboost/dataset.hpp"
#include "kpboost/image.hpp"

namespace kpboost::synth {

GrayImage flat(int w, int h, uint8_t value);

// Smooth low-frequency texture: bilinear upsampling of a coarse random
// grid around `base` with amplitude `amp`.
GrayImage textured(int w, int h, uint32_t seed, int base = 170, int amp = 25, int cell = 8);

void add_pixel_noise(GrayImage& img, uint32_t seed, int amp);
void fill_disc(GrayImage& img, int cx, int cy, int r, uint8_t value);
void fill_rect(GrayImage& img, int x, int y, int w, int h, uint8_t value);

// Single dark disc on a light background; the detector test target.
GrayImage blob(int w, int h, int cx, int cy, int r, uint8_t fg = 30, uint8_t bg = 220);

// 100x40 side-view car-like composite: body slab, roof, window, two dark
// wheel discs; pose, shade and background jittered per seed.
GrayImage car_positive(uint32_t seed);
// Same geometry and texture statistics, non-car clutter (bars, rects,
// stripes) instead of the car.
GrayImage car_negative(uint32_t seed);

// 40x80 upright figure: head disc, torso with belt band, arms, legs, feet.
GrayImage pedestrian_positive(uint32_t seed);
GrayImage pedestrian_negative(uint32_t seed);

enum class Category { car, pedestrian };

// Writes n_pos + n_neg PGM files under dir and returns the manifest
// (paths point into dir, no split flags).
DatasetManifest write_dataset(const std::string& dir, Category cat, int n_pos, int n_neg,
                              uint32_t seed);

// Numbered frames with a car-like object translating across a textured
// scene; frame 0 also gets clutter so filtering has something to reject.
void write_sequence(const std::string& dir, int frames, int width, int height, uint32_t seed);

}  // namespace kpboost::synth
