#pragma once

// Deterministic test images and synthetic hazy scenes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "nirdehaze/colorspace.hpp"
#include "nirdehaze/haze_model.hpp"
#include "nirdehaze/image.hpp"

namespace nirdehaze::testing {

inline PlanarImage random_image(int w, int h, int c, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0,
                                SampleDomain domain = SampleDomain::UnitInterval) {
    std::uniform_real_distribution<double> dist(lo, hi);
    PlanarImage img(w, h, c, domain);
    for (double& v : img.data()) v = dist(rng);
    return img;
}

/// Sum of a few random plane waves per channel, mapped into [lo, hi]. No flat patches.
inline PlanarImage smooth_random_image(int w, int h, int c, std::mt19937_64& rng, double lo = 0.1, double hi = 0.9) {
    std::uniform_real_distribution<double> freq(0.05, 0.6);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    PlanarImage img(w, h, c, SampleDomain::UnitInterval);
    for (int ch = 0; ch < c; ++ch) {
        double fx[3], fy[3], ph[3];
        for (int k = 0; k < 3; ++k) {
            fx[k] = freq(rng);
            fy[k] = freq(rng);
            ph[k] = phase(rng);
        }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += std::sin(fx[k] * x + fy[k] * y + ph[k]);
                img.at(ch, y, x) = lo + (hi - lo) * (s + 3.0) / 6.0;
            }
    }
    return img;
}

inline std::vector<double> samples(const PlanarImage& img) {
    return {img.data().begin(), img.data().end()};
}

inline void set_samples(PlanarImage& img, std::initializer_list<double> values) {
    std::copy(values.begin(), values.end(), img.data().begin());
}

inline double max_abs_diff(const PlanarImage& a, const PlanarImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

struct SyntheticScene {
    PlanarImage clean;
    PlanarImage depth;
    PlanarImage hazy;
    PlanarImage nir;
    RegionMask mask;  // haze = depth > 0
    Airlight airlight{0.9, 0.9, 0.9};
};

/**
 * Outdoor-like scene: a bright sky band on top, two hazy depth bands of
 * textured, saturated blocks, and a haze-free foreground. Every block has a
 * near-zero channel so the dark channel prior holds outside the sky. The NIR
 * image is a haze-free gray rendering of the clean scene.
 */
inline SyntheticScene make_scene(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    SyntheticScene s;
    s.clean = PlanarImage(w, h, 3, SampleDomain::UnitInterval);
    s.depth = PlanarImage(w, h, 1, SampleDomain::Unbounded);

    const int sky_end = h / 5;
    const int far_end = h / 2;
    const int mid_end = (4 * h) / 5;
    const double far_depth = 1.4 + 0.6 * u01(rng);
    const double mid_depth = 0.5 + 0.5 * u01(rng);
    const int block = std::max(8, w / 6);

    const int blocks_x = (w + block - 1) / block;
    const int blocks_y = (h + block - 1) / block;
    std::vector<std::array<double, 3>> colors(static_cast<std::size_t>(blocks_x * blocks_y));
    for (auto& col : colors) {
        const int dark = static_cast<int>(u01(rng) * 3.0) % 3;
        for (int k = 0; k < 3; ++k) col[k] = k == dark ? 0.02 : 0.25 + 0.5 * u01(rng);
    }
    const double fx = 0.2 + 0.3 * u01(rng);
    const double fy = 0.15 + 0.3 * u01(rng);
    const std::array<double, 3> sky{0.78, 0.83, 0.86};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double d;
            std::array<double, 3> col;
            if (y < sky_end) {
                d = 2.0;
                const double g = 0.02 * std::sin(0.1 * x + 0.2 * y);
                col = {sky[0] + g, sky[1] + g, sky[2] + g};
            } else {
                d = y < far_end ? far_depth : (y < mid_end ? mid_depth : 0.0);
                const auto& base = colors[static_cast<std::size_t>((y / block) * blocks_x + x / block)];
                const double tex = 0.75 + 0.25 * std::sin(fx * x) * std::cos(fy * y);
                for (int k = 0; k < 3; ++k) col[k] = base[k] * tex;
            }
            for (int k = 0; k < 3; ++k) s.clean.at(k, y, x) = std::clamp(col[k], 0.0, 0.85);
            s.depth.at(0, y, x) = d;
        }
    }
    s.hazy = synthesize_haze(s.clean, s.depth, s.airlight, 1.0);
    s.nir = luma(s.clean);
    for (double& v : s.nir.data()) v = std::clamp(0.9 * v + 0.05, 0.0, 1.0);
    s.nir.set_domain(SampleDomain::UnitInterval);
    s.mask = RegionMask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) s.mask.set(y, x, s.depth.at(0, y, x) > 0.0);
    return s;
}

}  // namespace nirdehaze::testing
