#pragma once

#include <cstddef>

#include "nirdehaze/image.hpp"

namespace nirdehaze {

/// Stabiliser of the structure term: (0.03 * L)^2 / 2 with L = 1.
inline constexpr double kIssStabilizer = 0.03 * 0.03 / 2.0;

struct MetricReport {
    double iss = 0.0;
    double cd = 0.0;
    double cf = 0.0;
    std::size_t haze_pixel_count = 0;
    std::size_t nonhaze_pixel_count = 0;
};

/**
 * Structure similarity (cov + c3) / (sd_test * sd_ref + c3) over the haze
 * pixels of `mask`. Both inputs are single-channel; the value can be
 * negative for anti-correlated inputs.
 */
double iss(const PlanarImage& test, const PlanarImage& ref, const RegionMask& mask);

/// Mean CIELAB Euclidean distance over the non-haze pixels.
double cd(const PlanarImage& test, const PlanarImage& ref, const RegionMask& mask);

/// Colorfulness sd_ab + 0.94 * mean chroma in CIELAB over the non-haze pixels.
double cf(const PlanarImage& test, const RegionMask& mask);

/**
 * ISS of the test luma against the NIR image on haze pixels; CD against the
 * visible reference and CF on non-haze pixels. The mask must contain both
 * regions.
 */
MetricReport evaluate(const PlanarImage& test, const PlanarImage& vis_ref, const PlanarImage& nir_ref,
                      const RegionMask& mask);

}  // namespace nirdehaze
