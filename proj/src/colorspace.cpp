#include "nirdehaze/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nirdehaze {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 inverse(const Mat3& m) {
    const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    const double s = 1.0 / det;
    Mat3 r{};
    r[0][0] = c00 * s;
    r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * s;
    r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * s;
    r[1][0] = c01 * s;
    r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * s;
    r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * s;
    r[2][0] = c02 * s;
    r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * s;
    r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * s;
    return r;
}

// RGB -> LMS of Reinhard et al., rows rescaled to unit sum so that white maps
// to (1, 1, 1) and gray has exactly zero chroma.
Mat3 make_rgb_to_lms() {
    Mat3 m{{{0.3811, 0.5783, 0.0402}, {0.1967, 0.7244, 0.0782}, {0.0241, 0.1288, 0.8444}}};
    for (auto& row : m) {
        const double sum = row[0] + row[1] + row[2];
        for (double& v : row) v /= sum;
    }
    return m;
}

const Mat3& rgb_to_lms() {
    static const Mat3 m = make_rgb_to_lms();
    return m;
}

const Mat3& lms_to_rgb() {
    static const Mat3 m = inverse(rgb_to_lms());
    return m;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);

void require_rgb(const PlanarImage& img, const char* who) {
    if (img.channels() != 3) throw std::invalid_argument(std::string(who) + ": expected a 3-channel image");
}

}  // namespace

OpponentImage rgb_to_decorrelated(const PlanarImage& rgb) {
    require_rgb(rgb, "rgb_to_decorrelated");
    const int w = rgb.width();
    const int h = rgb.height();
    OpponentImage out{PlanarImage(w, h, 1), PlanarImage(w, h, 1), PlanarImage(w, h, 1)};
    const auto& m = rgb_to_lms();
    const auto r = rgb.plane(0);
    const auto g = rgb.plane(1);
    const auto b = rgb.plane(2);
    auto l = out.luminance.plane(0);
    auto ca = out.chroma_a.plane(0);
    auto cb = out.chroma_b.plane(0);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        std::array<double, 3> lms{};
        for (int k = 0; k < 3; ++k) {
            const double v = m[k][0] * r[i] + m[k][1] * g[i] + m[k][2] * b[i];
            lms[k] = std::log10(std::max(v, kOpponentLogFloor));
        }
        l[i] = (lms[0] + lms[1] + lms[2]) * kInvSqrt3;
        ca[i] = (lms[0] + lms[1] - 2.0 * lms[2]) * kInvSqrt6;
        cb[i] = (lms[0] - lms[1]) * kInvSqrt2;
    }
    return out;
}

PlanarImage decorrelated_to_rgb(const OpponentImage& opp) {
    const auto& lum = opp.luminance;
    if (!lum.same_size(opp.chroma_a) || !lum.same_size(opp.chroma_b))
        throw std::invalid_argument("decorrelated_to_rgb: plane sizes differ");
    PlanarImage out(lum.width(), lum.height(), 3, SampleDomain::UnitInterval);
    const auto& m = lms_to_rgb();
    const auto l = lum.plane(0);
    const auto ca = opp.chroma_a.plane(0);
    const auto cb = opp.chroma_b.plane(0);
    auto r = out.plane(0);
    auto g = out.plane(1);
    auto b = out.plane(2);
    for (std::size_t i = 0; i < lum.pixel_count(); ++i) {
        const double ls = l[i] * kInvSqrt3;
        const double as = ca[i] * kInvSqrt6;
        const double bs = cb[i] * kInvSqrt2;
        const std::array<double, 3> lms{std::pow(10.0, ls + as + bs), std::pow(10.0, ls + as - bs),
                                        std::pow(10.0, ls - 2.0 * as)};
        std::array<double, 3> rgb{};
        for (int k = 0; k < 3; ++k)
            rgb[k] = std::clamp(m[k][0] * lms[0] + m[k][1] * lms[1] + m[k][2] * lms[2], 0.0, 1.0);
        r[i] = rgb[0];
        g[i] = rgb[1];
        b[i] = rgb[2];
    }
    return out;
}

PlanarImage gray_to_opponent_luminance(const PlanarImage& gray) {
    if (gray.channels() != 1)
        throw std::invalid_argument("gray_to_opponent_luminance: expected a single-channel image");
    PlanarImage out(gray.width(), gray.height(), 1);
    const double scale = 3.0 * kInvSqrt3;
    std::ranges::transform(gray.data(), out.data().begin(), [scale](double g) {
        return scale * std::log10(std::max(g, kOpponentLogFloor));
    });
    return out;
}

PlanarImage opponent_luminance_to_gray(const PlanarImage& luminance) {
    if (luminance.channels() != 1)
        throw std::invalid_argument("opponent_luminance_to_gray: expected a single-channel image");
    PlanarImage out(luminance.width(), luminance.height(), 1, SampleDomain::UnitInterval);
    const double scale = 1.0 / (3.0 * kInvSqrt3);
    std::ranges::transform(luminance.data(), out.data().begin(), [scale](double l) {
        return std::clamp(std::pow(10.0, l * scale), 0.0, 1.0);
    });
    return out;
}

LuminanceRange opponent_luminance_range() {
    const double scale = 3.0 * kInvSqrt3;
    return {scale * std::log10(kOpponentLogFloor), 0.0};
}

namespace {

// sRGB primaries, D65 white.
constexpr Mat3 kSrgbToXyz{{{0.4124564, 0.3575761, 0.1804375},
                           {0.2126729, 0.7151522, 0.0721750},
                           {0.0193339, 0.1191920, 0.9503041}}};

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

PlanarImage rgb_to_lab(const PlanarImage& rgb) {
    require_rgb(rgb, "rgb_to_lab");
    // White point taken from the matrix itself so achromatic input gives a* = b* = 0.
    std::array<double, 3> white{};
    for (int k = 0; k < 3; ++k) white[k] = kSrgbToXyz[k][0] + kSrgbToXyz[k][1] + kSrgbToXyz[k][2];

    PlanarImage out(rgb.width(), rgb.height(), 3);
    const auto r = rgb.plane(0);
    const auto g = rgb.plane(1);
    const auto b = rgb.plane(2);
    auto lp = out.plane(0);
    auto ap = out.plane(1);
    auto bp = out.plane(2);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const std::array<double, 3> lin{srgb_to_linear(r[i]), srgb_to_linear(g[i]), srgb_to_linear(b[i])};
        std::array<double, 3> f{};
        for (int k = 0; k < 3; ++k) {
            const double xyz = kSrgbToXyz[k][0] * lin[0] + kSrgbToXyz[k][1] * lin[1] + kSrgbToXyz[k][2] * lin[2];
            f[k] = lab_f(xyz / white[k]);
        }
        lp[i] = 116.0 * f[1] - 16.0;
        ap[i] = 500.0 * (f[0] - f[1]);
        bp[i] = 200.0 * (f[1] - f[2]);
    }
    return out;
}

PlanarImage luma(const PlanarImage& img) {
    if (img.channels() == 1) return img;
    require_rgb(img, "luma");
    PlanarImage out(img.width(), img.height(), 1, img.domain());
    const auto r = img.plane(0);
    const auto g = img.plane(1);
    const auto b = img.plane(2);
    auto y = out.plane(0);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return out;
}

}  // namespace nirdehaze
