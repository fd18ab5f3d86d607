#include "nirdehaze/haze_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nirdehaze {

void DarkChannelConfig::validate() const {
    if (patch_size < 1 || patch_size % 2 == 0)
        throw std::invalid_argument("dark channel patch_size must be odd, got " + std::to_string(patch_size));
    if (!(airlight_fraction > 0.0 && airlight_fraction <= 1.0))
        throw std::invalid_argument("airlight_fraction must be in (0, 1]");
    if (!(t_min > 0.0 && t_min < 1.0)) throw std::invalid_argument("t_min must be in (0, 1)");
    if (!(eps_log > 0.0)) throw std::invalid_argument("eps_log must be > 0");
}

namespace {

void require_rgb(const PlanarImage& img, const char* who) {
    if (img.channels() != 3) throw std::invalid_argument(std::string(who) + ": expected a 3-channel image");
}

// Minimum over channels at each pixel.
PlanarImage channel_min(const PlanarImage& img) {
    PlanarImage out = img.channel(0);
    auto o = out.plane(0);
    for (int c = 1; c < img.channels(); ++c) {
        const auto p = img.plane(c);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::min(o[i], p[i]);
    }
    return out;
}

}  // namespace

PlanarImage min_filter(const PlanarImage& img, int patch_size) {
    if (img.channels() != 1) throw std::invalid_argument("min_filter: expected a single-channel image");
    if (patch_size < 1 || patch_size % 2 == 0) throw std::invalid_argument("min_filter: patch size must be odd");
    const int w = img.width();
    const int h = img.height();
    const int r = patch_size / 2;

    // A square min is separable: rows first, then columns. Clamping the
    // index replicates the border.
    PlanarImage rows(w, h, 1, img.domain());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double m = img.at(0, y, std::clamp(x - r, 0, w - 1));
            for (int dx = -r + 1; dx <= r; ++dx) m = std::min(m, img.at(0, y, std::clamp(x + dx, 0, w - 1)));
            rows.at(0, y, x) = m;
        }
    }
    PlanarImage out(w, h, 1, img.domain());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double m = rows.at(0, std::clamp(y - r, 0, h - 1), x);
            for (int dy = -r + 1; dy <= r; ++dy) m = std::min(m, rows.at(0, std::clamp(y + dy, 0, h - 1), x));
            out.at(0, y, x) = m;
        }
    }
    return out;
}

PlanarImage dark_channel(const PlanarImage& rgb, int patch_size) {
    require_rgb(rgb, "dark_channel");
    return min_filter(channel_min(rgb), patch_size);
}

Airlight estimate_airlight(const PlanarImage& rgb, const PlanarImage& dark, double fraction) {
    require_rgb(rgb, "estimate_airlight");
    if (!rgb.same_size(dark) || dark.channels() != 1)
        throw std::invalid_argument("estimate_airlight: dark channel does not match the image");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("estimate_airlight: fraction must be in (0, 1]");

    const std::size_t n = rgb.pixel_count();
    const auto count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))), 1, n);
    const auto d = dark.plane(0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                      [&](std::size_t a, std::size_t b) { return d[a] > d[b] || (d[a] == d[b] && a < b); });

    Airlight a{};
    for (int c = 0; c < 3; ++c) {
        const auto p = rgb.plane(c);
        double sum = 0.0;
        for (std::size_t k = 0; k < count; ++k) sum += p[order[k]];
        a[c] = sum / static_cast<double>(count);
    }
    return a;
}

PlanarImage estimate_transmission(const PlanarImage& rgb, const Airlight& airlight, const DarkChannelConfig& cfg) {
    require_rgb(rgb, "estimate_transmission");
    cfg.validate();
    for (double a : airlight)
        if (!(a > 0.0)) throw std::invalid_argument("estimate_transmission: airlight channels must be > 0");

    PlanarImage ratio(rgb.width(), rgb.height(), 3);
    for (int c = 0; c < 3; ++c) {
        const auto src = rgb.plane(c);
        auto dst = ratio.plane(c);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / airlight[c];
    }
    PlanarImage t = dark_channel(ratio, cfg.patch_size);
    for (double& v : t.data()) v = std::clamp(1.0 - v, cfg.t_min, 1.0);
    t.set_domain(SampleDomain::UnitInterval);
    return t;
}

PlanarImage depth_from_transmission(const PlanarImage& transmission) {
    PlanarImage d(transmission.width(), transmission.height(), transmission.channels(), SampleDomain::LogDomain);
    std::ranges::transform(transmission.data(), d.data().begin(), [](double t) { return -std::log(t); });
    return d;
}

HazeEstimate estimate_haze(const PlanarImage& rgb, const DarkChannelConfig& cfg) {
    cfg.validate();
    const PlanarImage dark = dark_channel(rgb, cfg.patch_size);
    HazeEstimate est;
    est.airlight = estimate_airlight(rgb, dark, cfg.airlight_fraction);
    est.transmission = estimate_transmission(rgb, est.airlight, cfg);
    est.depth_log = depth_from_transmission(est.transmission);
    return est;
}

PlanarImage to_log_domain(const PlanarImage& x, const Airlight& airlight, double eps_log) {
    if (x.channels() != 1 && x.channels() != 3)
        throw std::invalid_argument("to_log_domain: expected 1 or 3 channels");
    const bool lift_gray = x.channels() == 1;
    PlanarImage u(x.width(), x.height(), 3, SampleDomain::LogDomain);
    for (int c = 0; c < 3; ++c) {
        const auto src = x.plane(lift_gray ? 0 : c);
        auto dst = u.plane(c);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::log(std::max(airlight[c] - src[i], eps_log));
    }
    return u;
}

PlanarImage from_log_domain(const PlanarImage& u, const Airlight& airlight) {
    if (u.channels() != 3) throw std::invalid_argument("from_log_domain: expected 3 channels");
    PlanarImage x(u.width(), u.height(), 3, SampleDomain::UnitInterval);
    for (int c = 0; c < 3; ++c) {
        const auto src = u.plane(c);
        auto dst = x.plane(c);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::clamp(airlight[c] - std::exp(src[i]), 0.0, 1.0);
    }
    return x;
}

PlanarImage synthesize_haze(const PlanarImage& clean, const PlanarImage& depth, const Airlight& airlight, double eta) {
    require_rgb(clean, "synthesize_haze");
    if (depth.channels() != 1 || !depth.same_size(clean))
        throw std::invalid_argument("synthesize_haze: depth must be a single-channel image matching the clean image");
    if (!(eta > 0.0)) throw std::invalid_argument("synthesize_haze: eta must be > 0");

    PlanarImage out(clean.width(), clean.height(), 3, SampleDomain::UnitInterval);
    const auto d = depth.plane(0);
    for (int c = 0; c < 3; ++c) {
        const auto src = clean.plane(c);
        auto dst = out.plane(c);
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (d[i] < 0.0) throw std::invalid_argument("synthesize_haze: negative depth");
            const double t = std::exp(-eta * d[i]);
            dst[i] = t * src[i] + (1.0 - t) * airlight[c];
        }
    }
    return out;
}

}  // namespace nirdehaze
