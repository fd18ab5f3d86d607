#pragma once

#include <filesystem>

#include "nirdehaze/errors.hpp"
#include "nirdehaze/image.hpp"

namespace nirdehaze {

/**
 * Loads an 8- or 16-bit PNG as a UnitInterval image. Gray (with or without
 * alpha) loads as one channel, RGB/RGBA/palette as three; alpha is dropped.
 * Throws IoError naming the path on any failure.
 */
PlanarImage load_image(const std::filesystem::path& path);

/// Writes a 1- or 3-channel image as PNG; samples are clamped to [0, 1] and rounded.
void save_image(const PlanarImage& img, const std::filesystem::path& path, int bit_depth = 8);

/// Pixels with luminance below 0.5 are haze (true).
RegionMask mask_from_image(const PlanarImage& img);
RegionMask load_mask(const std::filesystem::path& path);

/// Depth maps travel as gray PNG where full scale equals `max_depth`.
PlanarImage load_depth(const std::filesystem::path& path, double max_depth);
void save_depth(const PlanarImage& depth, const std::filesystem::path& path, double max_depth);

}  // namespace nirdehaze
