#pragma once

#include "nirdehaze/image.hpp"

namespace nirdehaze {

/// Floor applied to LMS responses before the base-10 logarithm.
inline constexpr double kOpponentLogFloor = 1e-4;

/**
 * Image in the decorrelated log-LMS opponent space (l, alpha, beta).
 *
 * `luminance` is the achromatic axis; `chroma_a` the yellow-blue axis and
 * `chroma_b` the red-green axis. Achromatic RGB maps to zero chroma.
 */
struct OpponentImage {
    PlanarImage luminance;
    PlanarImage chroma_a;
    PlanarImage chroma_b;
};

OpponentImage rgb_to_decorrelated(const PlanarImage& rgb);

/// Inverse of rgb_to_decorrelated; the result is clamped to [0, 1].
PlanarImage decorrelated_to_rgb(const OpponentImage& opp);

/// Opponent luminance of a gray image, i.e. of the RGB pixel (g, g, g).
PlanarImage gray_to_opponent_luminance(const PlanarImage& gray);

/// The gray level whose opponent luminance equals `luminance`, clamped to [0, 1].
PlanarImage opponent_luminance_to_gray(const PlanarImage& luminance);

/// Luminance values reachable from the unit RGB cube: [black-at-floor, white].
struct LuminanceRange {
    double lo;
    double hi;
};
LuminanceRange opponent_luminance_range();

/// sRGB (D65) to CIELAB. Output planes are L*, a*, b*.
PlanarImage rgb_to_lab(const PlanarImage& rgb);

/// Rec. 601 luma of an RGB image; single-channel images are returned as is.
PlanarImage luma(const PlanarImage& img);

}  // namespace nirdehaze
