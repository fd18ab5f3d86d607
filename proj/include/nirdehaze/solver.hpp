#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nirdehaze/coloring.hpp"
#include "nirdehaze/errors.hpp"
#include "nirdehaze/haze_model.hpp"
#include "nirdehaze/image.hpp"

namespace nirdehaze {

/// Which prior accompanies the haze data term.
enum class RegularizerMode {
    ColorReg,      // quadratic pull toward the colored NIR image, plus TV
    GradientOnly,  // TV only (color weight forced to zero)
    GradientDiff,  // L1 on gradients minus NIR log gradients
};

struct SolverConfig {
    double lambda0 = 1e5;
    double w1 = 0.8;  // share of lambda0 on the haze data term
    double w2 = 0.2;  // share of lambda0 on the color term
    double lambda3 = 1.0;
    int t_max = 7;
    double beta0 = 1.0;
    double beta_factor = 2.0;
    int inner_iters = 8;
    RegularizerMode mode = RegularizerMode::ColorReg;
    double linear_solve_tol = 1e-6;
    /// Order in which the RGB channels are processed. Channels are independent.
    std::array<int, 3> channel_order{0, 1, 2};

    void validate() const;
    /// Data/color weights actually used by `mode`: (1, 0) outside ColorReg.
    SolverConfig effective() const;
};

/// Auxiliary gradient variables of the split, one plane per direction.
struct SplitVariables {
    PlanarImage horizontal;
    PlanarImage vertical;
};

/// Soft threshold: sign(v) * max(|v| - theta, 0).
double shrink(double v, double theta);
PlanarImage shrink(const PlanarImage& v, double theta);

/**
 * Exact minimiser over u of
 *   lambda0/2 (w1 |u - data_target|^2 + w2 |u - color_target|^2) + beta/2 sum_j |g_j - D_j u|^2
 * with D_j periodic forward differences and g_j = gradient_targets. The
 * normal equations are diagonal in the DFT basis. Throws DegenerateSystemError
 * when lambda0 * (w1 + w2) <= 0.
 */
PlanarImage solve_u_subproblem(const PlanarImage& data_target, const PlanarImage& color_target,
                               const SplitVariables& gradient_targets, const SolverConfig& cfg, double beta);

/// ||A u - b|| / ||b|| for the system solve_u_subproblem inverts.
double u_subproblem_residual(const PlanarImage& u, const PlanarImage& data_target, const PlanarImage& color_target,
                             const SplitVariables& gradient_targets, const SolverConfig& cfg, double beta);

/**
 * Approximately minimises the TV-regularised haze problem for one channel by
 * half-quadratic splitting with a geometric beta continuation.
 *
 * `u_o` must be non-empty in ColorReg mode and `u_nir` non-empty in
 * GradientDiff mode; otherwise either may be a default-constructed image.
 */
PlanarImage inner_tv_solve(const PlanarImage& u_v, const PlanarImage& u_d, const PlanarImage& u_o,
                           const PlanarImage& u_nir, const SolverConfig& cfg);

/// Closed-form depth step: ((u_s - u_v) + lambda3 u_d_prev) / (1 + lambda3).
PlanarImage update_depth(const PlanarImage& u_s, const PlanarImage& u_v, const PlanarImage& u_d_prev,
                         double lambda3);

struct ObjectiveTerms {
    double data = 0.0;
    double color = 0.0;
    double gradient = 0.0;
    double depth = 0.0;
    double total() const { return data + color + gradient + depth; }
};

/// Terms of the joint objective for one channel, with lambda1,2 = lambda0 w1,2 / 2.
ObjectiveTerms objective_terms(const PlanarImage& u_s, const PlanarImage& u_d, const PlanarImage& u_d_prev,
                               const PlanarImage& u_v, const PlanarImage& u_o, const PlanarImage& u_nir,
                               const SolverConfig& cfg);

double objective_value(const PlanarImage& u_s, const PlanarImage& u_d, const PlanarImage& u_d_prev,
                       const PlanarImage& u_v, const PlanarImage& u_o, const PlanarImage& u_nir,
                       const SolverConfig& cfg);

struct DehazeDiagnostics {
    /// objective[c][t]: objective after outer iteration t + 1 of RGB channel c.
    std::array<std::vector<double>, 3> objective;
    /// Final per-channel log depth.
    PlanarImage depth_log;
};

struct DehazeResult {
    PlanarImage restored;     // RGB in [0, 1]
    HazeEstimate haze;        // dark channel prior initialisation
    PlanarImage colored_nir;  // color prior used by ColorReg
    DehazeDiagnostics diagnostics;
};

/**
 * Full restoration: colorize the NIR image, initialise airlight and depth
 * from the dark channel prior, alternate the TV image step and the depth
 * step for each channel, then map back from the log domain.
 *
 * When `colored_nir` is given it replaces the colorize() output.
 */
DehazeResult dehaze(const PlanarImage& vis, const PlanarImage& nir, const ColoringConfig& coloring_cfg,
                    const DarkChannelConfig& dark_cfg, const SolverConfig& solver_cfg,
                    std::optional<PlanarImage> colored_nir = std::nullopt);

}  // namespace nirdehaze
