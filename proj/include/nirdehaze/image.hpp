#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nirdehaze {

/// What range the samples of an image are expected to live in.
enum class SampleDomain { UnitInterval, LogDomain, Unbounded };

struct PixelCoord {
    int x = 0;
    int y = 0;
};

enum class GradientDirection { Horizontal, Vertical };

/**
 * Planar (channel-major) image of double samples.
 *
 * Plane c occupies data()[c * width * height, (c + 1) * width * height),
 * each plane stored row-major. Every buffer in the pipeline (visible,
 * near-infrared, colored NIR, log-domain estimates, depth) is one of these.
 */
class PlanarImage {
public:
    PlanarImage() = default;
    PlanarImage(int width, int height, int channels,
                SampleDomain domain = SampleDomain::Unbounded, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    /// Pixels per plane.
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    SampleDomain domain() const { return domain_; }
    void set_domain(SampleDomain domain) { domain_ = domain; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    std::span<double> plane(int c);
    std::span<const double> plane(int c) const;

    double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
    double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

    /// Copy of one channel as a single-channel image with the same domain.
    PlanarImage channel(int c) const;
    void set_channel(int c, const PlanarImage& plane_image);

    bool same_size(const PlanarImage& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// True when every sample is inside [0, 1].
    bool within_unit_interval() const;
    /// Clamps every sample into [0, 1] and tags the image UnitInterval.
    void clamp_to_unit();

    bool operator==(const PlanarImage& other) const = default;

private:
    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    SampleDomain domain_ = SampleDomain::Unbounded;
    std::vector<double> data_;
};

/// Stacks single-channel images into one multi-channel image.
PlanarImage stack_channels(std::span<const PlanarImage> planes, SampleDomain domain);

/// Haze/non-haze partition of an image; true marks a haze pixel.
class RegionMask {
public:
    RegionMask() = default;
    RegionMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return bits_.size(); }

    bool is_haze(std::size_t i) const { return bits_[i] != 0; }
    bool is_haze(int y, int x) const { return is_haze(static_cast<std::size_t>(y) * width_ + x); }
    void set(int y, int x, bool haze) { bits_[static_cast<std::size_t>(y) * width_ + x] = haze ? 1 : 0; }

    std::size_t haze_count() const;
    std::size_t nonhaze_count() const { return pixel_count() - haze_count(); }

    bool matches(const PlanarImage& img) const {
        return width_ == img.width() && height_ == img.height();
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<unsigned char> bits_;
};

/**
 * size x size neighbourhood of `center` in one channel, row-major.
 * Coordinates outside the image are clamped to the nearest edge pixel.
 * Throws std::invalid_argument for an even size or a bad channel index.
 */
std::vector<double> extract_patch(const PlanarImage& img, int channel, PixelCoord center, int size);

/// Forward difference (next - current) with wrap-around at the last row/column.
PlanarImage gradient(const PlanarImage& img, GradientDirection direction);

/// Adjoint of gradient(): (previous - current) with wrap-around.
PlanarImage gradient_adjoint(const PlanarImage& img, GradientDirection direction);

}  // namespace nirdehaze
