#pragma once

#include <array>

#include "nirdehaze/image.hpp"

namespace nirdehaze {

/// Atmospheric light color, one entry per RGB channel.
using Airlight = std::array<double, 3>;

struct DarkChannelConfig {
    int patch_size = 15;
    double airlight_fraction = 0.001;  // share of brightest dark-channel pixels averaged
    double t_min = 0.1;
    double eps_log = 1.0 / 255.0;      // floor on (airlight - x) before the log

    void validate() const;
};

/// Airlight, transmission in [t_min, 1], and depth_log = -ln(transmission).
struct HazeEstimate {
    Airlight airlight{};
    PlanarImage transmission;
    PlanarImage depth_log;
};

/// Per pixel, min over the three channels and the patch (edges replicated).
PlanarImage dark_channel(const PlanarImage& rgb, int patch_size);

/// Min filter of a single-channel image over a square patch, edges replicated.
PlanarImage min_filter(const PlanarImage& img, int patch_size);

/**
 * Mean RGB of the ceil(fraction * N) pixels with the largest dark-channel value.
 * Ties are broken by row-major index, lowest first.
 */
Airlight estimate_airlight(const PlanarImage& rgb, const PlanarImage& dark, double fraction);

/// 1 - min_c min_patch(x_c / airlight_c), clamped to [t_min, 1].
PlanarImage estimate_transmission(const PlanarImage& rgb, const Airlight& airlight, const DarkChannelConfig& cfg);

/// Runs the dark channel, airlight and transmission steps together.
HazeEstimate estimate_haze(const PlanarImage& rgb, const DarkChannelConfig& cfg);

/// -ln(t) per pixel.
PlanarImage depth_from_transmission(const PlanarImage& transmission);

/**
 * u_c = ln(max(airlight_c - x_c, eps_log)).
 * A single-channel input is lifted against every airlight channel and
 * yields three planes.
 */
PlanarImage to_log_domain(const PlanarImage& x, const Airlight& airlight, double eps_log);

/// x_c = airlight_c - exp(u_c), clamped to [0, 1].
PlanarImage from_log_domain(const PlanarImage& u, const Airlight& airlight);

/// Blends `clean` toward the airlight with transmission exp(-eta * depth).
PlanarImage synthesize_haze(const PlanarImage& clean, const PlanarImage& depth, const Airlight& airlight, double eta);

}  // namespace nirdehaze
