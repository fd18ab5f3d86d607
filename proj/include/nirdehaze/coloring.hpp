#pragma once

#include <span>
#include <vector>

#include "nirdehaze/errors.hpp"
#include "nirdehaze/image.hpp"

namespace nirdehaze {

struct AffineMap {
    double slope = 1.0;
    double bias = 0.0;
};

/// Per-pixel affine map from NIR luminance to visible luminance.
struct MappingField {
    PlanarImage slope;
    PlanarImage bias;
};

struct ColoringConfig {
    int patch_size = 5;
    double mu_c = 0.5;       // pull of the fitted map toward the contrast prior
    double eps_sigma = 1e-6;  // added to the NIR patch deviation
    double eps_div = 1e-3;    // floor on the slope when dividing chroma

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Contrast prior for a patch pair: deviation ratio slope and mean-matching bias.
AffineMap local_contrast_prior(std::span<const double> visible, std::span<const double> nir,
                               double eps_sigma = 1e-6);

/**
 * Minimises sum_j w_j (p_j - slope q_j - bias)^2 + mu_c |(slope, bias) - prior|^2.
 *
 * Solved in closed form from the 2x2 regularised normal equations.
 * Throws DegenerateSystemError if mu_c = 0 and q carries no spread.
 */
AffineMap fit_mapping(std::span<const double> visible, std::span<const double> nir,
                      std::span<const double> weights, double mu_c, AffineMap prior);

/// Patch weights 1 / (1 + distance to centre), normalised to sum to one.
std::vector<double> patch_weights(int patch_size);

MappingField build_mapping_field(const PlanarImage& vis_lum, const PlanarImage& nir_lum,
                                 const ColoringConfig& cfg);

/// nir * slope + bias, clamped to the opponent luminance range.
PlanarImage apply_luminance_mapping(const PlanarImage& nir_lum, const MappingField& field);

struct ChromaPlanes {
    PlanarImage a;
    PlanarImage b;
};

/// Divides both chroma planes by max(slope, eps_div).
ChromaPlanes transfer_chrominance(const ChromaPlanes& vis_chroma, const MappingField& field, double eps_div);

/// Colored near-infrared image: NIR structure with colors borrowed from `vis`.
PlanarImage colorize(const PlanarImage& vis, const PlanarImage& nir, const ColoringConfig& cfg);

}  // namespace nirdehaze
