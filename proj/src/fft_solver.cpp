#include "fft_solver.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nirdehaze::detail {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<double> laplacian_eigenvalues(int n) {
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) e[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n);
    return e;
}

}  // namespace

PeriodicScreenedPoisson::PeriodicScreenedPoisson(int width, int height)
    : width_(width), height_(height), half_width_(width / 2 + 1),
      eig_x_(laplacian_eigenvalues(width)), eig_y_(laplacian_eigenvalues(height)) {
    const std::size_t n_real = static_cast<std::size_t>(width) * height;
    const std::size_t n_complex = static_cast<std::size_t>(height) * half_width_;
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(n_real);
    spectrum_ = fftw_alloc_complex(n_complex);
    if (!real_ || !spectrum_) {
        fftw_free(real_);
        fftw_free(spectrum_);
        throw std::bad_alloc();
    }
    forward_ = fftw_plan_dft_r2c_2d(height, width, real_, spectrum_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(height, width, spectrum_, real_, FFTW_ESTIMATE);
}

PeriodicScreenedPoisson::~PeriodicScreenedPoisson() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spectrum_);
}

void PeriodicScreenedPoisson::solve(std::span<const double> rhs, double data_weight, double beta,
                                    std::span<double> out) {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    if (rhs.size() != n || out.size() != n) throw std::invalid_argument("PeriodicScreenedPoisson: size mismatch");

    std::copy(rhs.begin(), rhs.end(), real_);
    fftw_execute(forward_);
    const double norm = 1.0 / static_cast<double>(n);
    for (int ky = 0; ky < height_; ++ky) {
        for (int kx = 0; kx < half_width_; ++kx) {
            const double denom = data_weight + beta * (eig_x_[kx] + eig_y_[ky]);
            auto& z = spectrum_[static_cast<std::size_t>(ky) * half_width_ + kx];
            const double s = norm / denom;
            z[0] *= s;
            z[1] *= s;
        }
    }
    fftw_execute(inverse_);
    std::copy(real_, real_ + n, out.begin());
}

}  // namespace nirdehaze::detail
