#include "nirdehaze/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "nirdehaze/colorspace.hpp"

namespace nirdehaze {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Filled through a reference so nothing in the setjmp frame changes after setjmp.
struct PngBuffer {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<unsigned char> bytes;
    std::vector<png_bytep> rows;
    char error[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
    auto* buf = static_cast<PngBuffer*>(png_get_error_ptr(png));
    std::snprintf(buf->error, sizeof(buf->error), "%s", msg);
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

bool decode_png(std::FILE* fp, PngBuffer& buf) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &buf, on_png_error, on_png_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    buf.width = png_get_image_width(png, info);
    buf.height = png_get_image_height(png, info);
    buf.channels = png_get_channels(png, info);
    buf.bit_depth = png_get_bit_depth(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buf.bytes.resize(row_bytes * buf.height);
    buf.rows.resize(buf.height);
    for (png_uint_32 y = 0; y < buf.height; ++y) buf.rows[y] = buf.bytes.data() + y * row_bytes;
    png_read_image(png, buf.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode_png(std::FILE* fp, PngBuffer& buf) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &buf, on_png_error, on_png_warning);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, buf.width, buf.height, buf.bit_depth,
                 buf.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, buf.rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& reason) {
    throw IoError(path.string() + ": " + reason);
}

}  // namespace

PlanarImage load_image(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, std::strerror(errno));

    unsigned char sig[8] = {};
    if (std::fread(sig, 1, sizeof(sig), fp.get()) != sizeof(sig) || png_sig_cmp(sig, 0, sizeof(sig)) != 0)
        fail(path, "not a PNG file");
    std::rewind(fp.get());

    PngBuffer buf;
    if (!decode_png(fp.get(), buf)) fail(path, buf.error[0] ? buf.error : "cannot decode PNG");
    if (buf.channels != 1 && buf.channels != 3) fail(path, "unsupported channel layout");
    if (buf.bit_depth != 8 && buf.bit_depth != 16) fail(path, "unsupported bit depth");

    const int w = static_cast<int>(buf.width);
    const int h = static_cast<int>(buf.height);
    const double max_value = buf.bit_depth == 16 ? 65535.0 : 255.0;
    const int bytes_per_sample = buf.bit_depth / 8;
    PlanarImage img(w, h, buf.channels, SampleDomain::UnitInterval);
    for (int y = 0; y < h; ++y) {
        const unsigned char* row = buf.rows[static_cast<std::size_t>(y)];
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < buf.channels; ++c) {
                const unsigned char* s = row + (static_cast<std::size_t>(x) * buf.channels + c) * bytes_per_sample;
                const unsigned v = bytes_per_sample == 2 ? (unsigned{s[0]} << 8) | s[1] : s[0];
                img.at(c, y, x) = v / max_value;
            }
        }
    }
    return img;
}

void save_image(const PlanarImage& img, const std::filesystem::path& path, int bit_depth) {
    if (img.channels() != 1 && img.channels() != 3) throw std::invalid_argument("save_image: only 1- or 3-channel images can be written");
    if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("save_image: bit depth must be 8 or 16");

    PngBuffer buf;
    buf.width = static_cast<png_uint_32>(img.width());
    buf.height = static_cast<png_uint_32>(img.height());
    buf.channels = img.channels();
    buf.bit_depth = bit_depth;
    const int bytes_per_sample = bit_depth / 8;
    const double max_value = bit_depth == 16 ? 65535.0 : 255.0;
    const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * img.channels() * bytes_per_sample;
    buf.bytes.resize(row_bytes * buf.height);
    buf.rows.resize(buf.height);
    for (int y = 0; y < img.height(); ++y) {
        unsigned char* row = buf.bytes.data() + static_cast<std::size_t>(y) * row_bytes;
        buf.rows[static_cast<std::size_t>(y)] = row;
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                const auto v = static_cast<unsigned>(std::lround(std::clamp(img.at(c, y, x), 0.0, 1.0) * max_value));
                unsigned char* d = row + (static_cast<std::size_t>(x) * img.channels() + c) * bytes_per_sample;
                if (bytes_per_sample == 2) {
                    d[0] = static_cast<unsigned char>(v >> 8);
                    d[1] = static_cast<unsigned char>(v & 0xff);
                } else {
                    d[0] = static_cast<unsigned char>(v);
                }
            }
        }
    }

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, std::strerror(errno));
    if (!encode_png(fp.get(), buf)) fail(path, buf.error[0] ? buf.error : "cannot encode PNG");
    if (std::fflush(fp.get()) != 0) fail(path, std::strerror(errno));
}

RegionMask mask_from_image(const PlanarImage& img) {
    const PlanarImage y = luma(img);
    RegionMask mask(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c) mask.set(r, c, y.at(0, r, c) < 0.5);
    return mask;
}

RegionMask load_mask(const std::filesystem::path& path) { return mask_from_image(load_image(path)); }

PlanarImage load_depth(const std::filesystem::path& path, double max_depth) {
    if (!(max_depth > 0.0)) throw std::invalid_argument("load_depth: max_depth must be > 0");
    PlanarImage img = load_image(path);
    PlanarImage depth = luma(img);
    for (double& v : depth.data()) v *= max_depth;
    depth.set_domain(SampleDomain::Unbounded);
    return depth;
}

void save_depth(const PlanarImage& depth, const std::filesystem::path& path, double max_depth) {
    if (!(max_depth > 0.0)) throw std::invalid_argument("save_depth: max_depth must be > 0");
    if (depth.channels() != 1) fail(path, "depth must be a single-channel image");
    PlanarImage scaled = depth;
    for (double& v : scaled.data()) v /= max_depth;
    save_image(scaled, path, 16);
}

}  // namespace nirdehaze
