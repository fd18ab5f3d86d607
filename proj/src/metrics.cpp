#include "nirdehaze/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nirdehaze/colorspace.hpp"

namespace nirdehaze {

namespace {

void require_mask(const RegionMask& mask, const PlanarImage& img, const char* who) {
    if (!mask.matches(img)) throw std::invalid_argument(std::string(who) + ": mask size does not match the image");
}

}  // namespace

double iss(const PlanarImage& test, const PlanarImage& ref, const RegionMask& mask) {
    if (test.channels() != 1 || ref.channels() != 1)
        throw std::invalid_argument("iss: expected single-channel images");
    if (!test.same_size(ref)) throw std::invalid_argument("iss: image sizes differ");
    require_mask(mask, test, "iss");
    const std::size_t n = mask.haze_count();
    if (n < 2) throw std::invalid_argument("iss: the haze region needs at least two pixels");

    const auto x = test.plane(0);
    const auto y = ref.plane(0);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!mask.is_haze(i)) continue;
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!mask.is_haze(i)) continue;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cxy += dx * dy;
    }
    const double nn = static_cast<double>(n);
    const double sx = std::sqrt(vx / nn);
    const double sy = std::sqrt(vy / nn);
    return (cxy / nn + kIssStabilizer) / (sx * sy + kIssStabilizer);
}

double cd(const PlanarImage& test, const PlanarImage& ref, const RegionMask& mask) {
    if (!test.same_size(ref)) throw std::invalid_argument("cd: image sizes differ");
    require_mask(mask, test, "cd");
    const std::size_t n = mask.nonhaze_count();
    if (n == 0) throw std::invalid_argument("cd: the non-haze region is empty");

    const PlanarImage a = rgb_to_lab(test);
    const PlanarImage b = rgb_to_lab(ref);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) {
        if (mask.is_haze(i)) continue;
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = a.plane(c)[i] - b.plane(c)[i];
            d2 += d * d;
        }
        sum += std::sqrt(d2);
    }
    return sum / static_cast<double>(n);
}

double cf(const PlanarImage& test, const RegionMask& mask) {
    require_mask(mask, test, "cf");
    const std::size_t n = mask.nonhaze_count();
    if (n == 0) throw std::invalid_argument("cf: the non-haze region is empty");

    const PlanarImage lab = rgb_to_lab(test);
    const auto a = lab.plane(1);
    const auto b = lab.plane(2);
    double ma = 0.0, mb = 0.0, mc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (mask.is_haze(i)) continue;
        ma += a[i];
        mb += b[i];
        mc += std::hypot(a[i], b[i]);
    }
    const double nn = static_cast<double>(n);
    ma /= nn;
    mb /= nn;
    mc /= nn;
    double va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (mask.is_haze(i)) continue;
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return std::sqrt(va / nn + vb / nn) + 0.94 * mc;
}

MetricReport evaluate(const PlanarImage& test, const PlanarImage& vis_ref, const PlanarImage& nir_ref,
                      const RegionMask& mask) {
    if (test.channels() != 3 || vis_ref.channels() != 3 || nir_ref.channels() != 1)
        throw std::invalid_argument("evaluate: expected RGB test/visible images and a gray NIR image");
    if (!test.same_size(vis_ref) || !test.same_size(nir_ref))
        throw std::invalid_argument("evaluate: image sizes differ");
    if (mask.haze_count() == 0 || mask.nonhaze_count() == 0)
        throw std::invalid_argument("evaluate: the mask must contain both haze and non-haze pixels");

    MetricReport report;
    report.iss = iss(luma(test), nir_ref, mask);
    report.cd = cd(test, vis_ref, mask);
    report.cf = cf(test, mask);
    report.haze_pixel_count = mask.haze_count();
    report.nonhaze_pixel_count = mask.nonhaze_count();
    return report;
}

}  // namespace nirdehaze
