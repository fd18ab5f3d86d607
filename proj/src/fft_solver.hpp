#pragma once

#include <span>
#include <vector>

#include <fftw3.h>

namespace nirdehaze::detail {

/**
 * Solves (data_weight * I + beta * (Dx^T Dx + Dy^T Dy)) u = rhs on a
 * periodic grid, where Dx, Dy are forward differences. The operator is
 * block-circulant, so the solve is a pointwise division in the DFT domain.
 */
class PeriodicScreenedPoisson {
public:
    PeriodicScreenedPoisson(int width, int height);
    ~PeriodicScreenedPoisson();
    PeriodicScreenedPoisson(const PeriodicScreenedPoisson&) = delete;
    PeriodicScreenedPoisson& operator=(const PeriodicScreenedPoisson&) = delete;

    /// Writes the solution into `out`. Requires data_weight > 0 or a zero-mean system is undefined.
    void solve(std::span<const double> rhs, double data_weight, double beta, std::span<double> out);

private:
    int width_;
    int height_;
    int half_width_;
    double* real_ = nullptr;
    fftw_complex* spectrum_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
    std::vector<double> eig_x_;
    std::vector<double> eig_y_;
};

}  // namespace nirdehaze::detail
