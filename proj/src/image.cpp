#include "nirdehaze/image.hpp"

#include <algorithm>
#include <string>

namespace nirdehaze {

PlanarImage::PlanarImage(int width, int height, int channels, SampleDomain domain, double fill)
    : width_(width), height_(height), channels_(channels), domain_(domain) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("PlanarImage: width and height must be >= 1");
    if (channels < 1)
        throw std::invalid_argument("PlanarImage: channels must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

std::span<double> PlanarImage::plane(int c) {
    if (c < 0 || c >= channels_)
        throw std::out_of_range("PlanarImage::plane: channel " + std::to_string(c));
    return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * pixel_count(), pixel_count());
}

std::span<const double> PlanarImage::plane(int c) const {
    if (c < 0 || c >= channels_)
        throw std::out_of_range("PlanarImage::plane: channel " + std::to_string(c));
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * pixel_count(),
                                                  pixel_count());
}

PlanarImage PlanarImage::channel(int c) const {
    PlanarImage out(width_, height_, 1, domain_);
    std::ranges::copy(plane(c), out.data_.begin());
    return out;
}

void PlanarImage::set_channel(int c, const PlanarImage& plane_image) {
    if (!same_size(plane_image) || plane_image.channels() != 1)
        throw std::invalid_argument("PlanarImage::set_channel: expected a matching single-channel image");
    std::ranges::copy(plane_image.data(), plane(c).begin());
}

bool PlanarImage::within_unit_interval() const {
    return std::ranges::all_of(data_, [](double v) { return v >= 0.0 && v <= 1.0; });
}

void PlanarImage::clamp_to_unit() {
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
    domain_ = SampleDomain::UnitInterval;
}

PlanarImage stack_channels(std::span<const PlanarImage> planes, SampleDomain domain) {
    if (planes.empty()) throw std::invalid_argument("stack_channels: no planes");
    const auto& first = planes.front();
    PlanarImage out(first.width(), first.height(), static_cast<int>(planes.size()), domain);
    for (std::size_t c = 0; c < planes.size(); ++c) out.set_channel(static_cast<int>(c), planes[c]);
    return out;
}

RegionMask::RegionMask(int width, int height, bool fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("RegionMask: width and height must be >= 1");
    bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t RegionMask::haze_count() const {
    return static_cast<std::size_t>(std::ranges::count(bits_, 1));
}

std::vector<double> extract_patch(const PlanarImage& img, int channel, PixelCoord center, int size) {
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("extract_patch: patch size must be odd, got " + std::to_string(size));
    if (channel < 0 || channel >= img.channels())
        throw std::invalid_argument("extract_patch: channel out of range");

    const int r = size / 2;
    std::vector<double> patch;
    patch.reserve(static_cast<std::size_t>(size) * size);
    for (int dy = -r; dy <= r; ++dy) {
        const int y = std::clamp(center.y + dy, 0, img.height() - 1);
        for (int dx = -r; dx <= r; ++dx) {
            const int x = std::clamp(center.x + dx, 0, img.width() - 1);
            patch.push_back(img.at(channel, y, x));
        }
    }
    return patch;
}

namespace {

void require_single_channel(const PlanarImage& img, const char* who) {
    if (img.channels() != 1)
        throw std::invalid_argument(std::string(who) + ": expected a single-channel image");
}

}  // namespace

PlanarImage gradient(const PlanarImage& img, GradientDirection direction) {
    require_single_channel(img, "gradient");
    const int w = img.width();
    const int h = img.height();
    PlanarImage out(w, h, 1, SampleDomain::Unbounded);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double next = direction == GradientDirection::Horizontal
                                    ? img.at(0, y, x + 1 == w ? 0 : x + 1)
                                    : img.at(0, y + 1 == h ? 0 : y + 1, x);
            out.at(0, y, x) = next - img.at(0, y, x);
        }
    }
    return out;
}

PlanarImage gradient_adjoint(const PlanarImage& img, GradientDirection direction) {
    require_single_channel(img, "gradient_adjoint");
    const int w = img.width();
    const int h = img.height();
    PlanarImage out(w, h, 1, SampleDomain::Unbounded);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double prev = direction == GradientDirection::Horizontal
                                    ? img.at(0, y, x == 0 ? w - 1 : x - 1)
                                    : img.at(0, y == 0 ? h - 1 : y - 1, x);
            out.at(0, y, x) = prev - img.at(0, y, x);
        }
    }
    return out;
}

}  // namespace nirdehaze
