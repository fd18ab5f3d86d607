#include "nirdehaze/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nirdehaze/colorspace.hpp"

namespace nirdehaze {

void ColoringConfig::validate() const {
    if (patch_size < 3 || patch_size % 2 == 0)
        throw std::invalid_argument("coloring patch_size must be odd and >= 3, got " + std::to_string(patch_size));
    if (!(mu_c >= 0.0)) throw std::invalid_argument("coloring mu_c must be >= 0");
    if (!(eps_sigma >= 0.0)) throw std::invalid_argument("coloring eps_sigma must be >= 0");
    if (!(eps_div > 0.0)) throw std::invalid_argument("coloring eps_div must be > 0");
}

namespace {

struct MeanStd {
    double mean;
    double stddev;
};

MeanStd mean_std(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

}  // namespace

AffineMap local_contrast_prior(std::span<const double> visible, std::span<const double> nir, double eps_sigma) {
    if (visible.size() != nir.size() || visible.empty())
        throw std::invalid_argument("local_contrast_prior: patches must be non-empty and of equal length");
    const auto p = mean_std(visible);
    const auto q = mean_std(nir);
    const double slope = p.stddev / (q.stddev + eps_sigma);
    return {slope, p.mean - slope * q.mean};
}

AffineMap fit_mapping(std::span<const double> visible, std::span<const double> nir,
                      std::span<const double> weights, double mu_c, AffineMap prior) {
    if (visible.size() != nir.size() || visible.size() != weights.size())
        throw std::invalid_argument("fit_mapping: patch and weight lengths differ");
    double sw = 0.0, swq = 0.0, swqq = 0.0, swp = 0.0, swqp = 0.0;
    for (std::size_t j = 0; j < visible.size(); ++j) {
        const double w = weights[j];
        if (w < 0.0) throw std::invalid_argument("fit_mapping: negative weight");
        sw += w;
        swq += w * nir[j];
        swqq += w * nir[j] * nir[j];
        swp += w * visible[j];
        swqp += w * nir[j] * visible[j];
    }
    const double a11 = swqq + mu_c;
    const double a12 = swq;
    const double a22 = sw + mu_c;
    const double b1 = swqp + mu_c * prior.slope;
    const double b2 = swp + mu_c * prior.bias;
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-12 * a11 * a22))
        throw DegenerateSystemError("fit_mapping: singular normal equations (constant NIR patch with mu_c = 0)");
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
}

std::vector<double> patch_weights(int patch_size) {
    if (patch_size < 1 || patch_size % 2 == 0)
        throw std::invalid_argument("patch_weights: patch size must be odd");
    const int r = patch_size / 2;
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(patch_size) * patch_size);
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) w.push_back(1.0 / (1.0 + std::hypot(dx, dy)));
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    return w;
}

MappingField build_mapping_field(const PlanarImage& vis_lum, const PlanarImage& nir_lum, const ColoringConfig& cfg) {
    cfg.validate();
    if (vis_lum.channels() != 1 || nir_lum.channels() != 1)
        throw std::invalid_argument("build_mapping_field: expected single-channel luminance planes");
    if (!vis_lum.same_size(nir_lum))
        throw std::invalid_argument("build_mapping_field: visible and NIR sizes differ");

    const int w = vis_lum.width();
    const int h = vis_lum.height();
    const auto weights = patch_weights(cfg.patch_size);
    MappingField field{PlanarImage(w, h, 1), PlanarImage(w, h, 1)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto p = extract_patch(vis_lum, 0, {x, y}, cfg.patch_size);
            const auto q = extract_patch(nir_lum, 0, {x, y}, cfg.patch_size);
            const AffineMap prior = local_contrast_prior(p, q, cfg.eps_sigma);
            const AffineMap fit = fit_mapping(p, q, weights, cfg.mu_c, prior);
            field.slope.at(0, y, x) = fit.slope;
            field.bias.at(0, y, x) = fit.bias;
        }
    }
    return field;
}

PlanarImage apply_luminance_mapping(const PlanarImage& nir_lum, const MappingField& field) {
    if (!nir_lum.same_size(field.slope) || !nir_lum.same_size(field.bias) || nir_lum.channels() != 1)
        throw std::invalid_argument("apply_luminance_mapping: size mismatch");
    const auto range = opponent_luminance_range();
    PlanarImage out(nir_lum.width(), nir_lum.height(), 1);
    const auto q = nir_lum.plane(0);
    const auto s = field.slope.plane(0);
    const auto b = field.bias.plane(0);
    auto o = out.plane(0);
    for (std::size_t i = 0; i < q.size(); ++i) o[i] = std::clamp(q[i] * s[i] + b[i], range.lo, range.hi);
    return out;
}

ChromaPlanes transfer_chrominance(const ChromaPlanes& vis_chroma, const MappingField& field, double eps_div) {
    if (!vis_chroma.a.same_size(field.slope) || !vis_chroma.b.same_size(field.slope))
        throw std::invalid_argument("transfer_chrominance: size mismatch");
    ChromaPlanes out{vis_chroma.a, vis_chroma.b};
    const auto s = field.slope.plane(0);
    auto a = out.a.plane(0);
    auto b = out.b.plane(0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::max(s[i], eps_div);
        a[i] /= d;
        b[i] /= d;
    }
    return out;
}

PlanarImage colorize(const PlanarImage& vis, const PlanarImage& nir, const ColoringConfig& cfg) {
    if (vis.channels() != 3 || nir.channels() != 1)
        throw std::invalid_argument("colorize: expected 3-channel visible and 1-channel NIR images");
    if (!vis.same_size(nir)) throw std::invalid_argument("colorize: visible and NIR sizes differ");

    const OpponentImage opp = rgb_to_decorrelated(vis);
    const PlanarImage nir_lum = gray_to_opponent_luminance(nir);
    const MappingField field = build_mapping_field(opp.luminance, nir_lum, cfg);
    ChromaPlanes chroma = transfer_chrominance({opp.chroma_a, opp.chroma_b}, field, cfg.eps_div);
    OpponentImage colored{apply_luminance_mapping(nir_lum, field), std::move(chroma.a), std::move(chroma.b)};
    return decorrelated_to_rgb(colored);
}

}  // namespace nirdehaze
