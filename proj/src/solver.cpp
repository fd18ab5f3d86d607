#include "nirdehaze/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft_solver.hpp"

namespace nirdehaze {

void SolverConfig::validate() const {
    if (!(lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be > 0");
    if (!(w1 >= 0.0 && w2 >= 0.0)) throw std::invalid_argument("w1 and w2 must be >= 0");
    if (std::abs(w1 + w2 - 1.0) > 1e-9) throw std::invalid_argument("w1 + w2 must equal 1");
    if (!(lambda3 > 0.0)) throw std::invalid_argument("lambda3 must be > 0");
    if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
    if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
    if (!(beta_factor >= 1.0)) throw std::invalid_argument("beta_factor must be >= 1");
    if (inner_iters < 1) throw std::invalid_argument("inner_iters must be >= 1");
    if (!(linear_solve_tol > 0.0)) throw std::invalid_argument("linear_solve_tol must be > 0");
    auto sorted = channel_order;
    std::ranges::sort(sorted);
    if (sorted != std::array<int, 3>{0, 1, 2})
        throw std::invalid_argument("channel_order must be a permutation of 0, 1, 2");
}

SolverConfig SolverConfig::effective() const {
    SolverConfig eff = *this;
    if (mode != RegularizerMode::ColorReg) {
        eff.w1 = 1.0;
        eff.w2 = 0.0;
    }
    return eff;
}

double shrink(double v, double theta) {
    const double mag = std::max(std::abs(v) - theta, 0.0);
    return v < 0.0 ? -mag : mag;
}

PlanarImage shrink(const PlanarImage& v, double theta) {
    PlanarImage out(v.width(), v.height(), v.channels(), SampleDomain::Unbounded);
    std::ranges::transform(v.data(), out.data().begin(), [theta](double x) { return shrink(x, theta); });
    return out;
}

namespace {

void require_plane(const PlanarImage& img, const PlanarImage& like, const char* who, const char* name) {
    if (img.channels() != 1 || !img.same_size(like))
        throw std::invalid_argument(std::string(who) + ": " + name + " must be a single-channel plane of matching size");
}

// b = lambda0 w1 data + lambda0 w2 color + beta sum_j D_j^T g_j
PlanarImage assemble_rhs(const PlanarImage& data_target, const PlanarImage& color_target,
                         const SplitVariables& g, const SolverConfig& cfg, double beta) {
    const double a1 = cfg.lambda0 * cfg.w1;
    const double a2 = cfg.lambda0 * cfg.w2;
    PlanarImage rhs(data_target.width(), data_target.height(), 1);
    auto r = rhs.plane(0);
    const auto d = data_target.plane(0);
    const auto c = color_target.plane(0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a1 * d[i] + a2 * c[i];
    if (beta != 0.0) {
        const PlanarImage gx = gradient_adjoint(g.horizontal, GradientDirection::Horizontal);
        const PlanarImage gy = gradient_adjoint(g.vertical, GradientDirection::Vertical);
        const auto px = gx.plane(0);
        const auto py = gy.plane(0);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += beta * (px[i] + py[i]);
    }
    return rhs;
}

PlanarImage apply_operator(const PlanarImage& u, const SolverConfig& cfg, double beta) {
    const double a = cfg.lambda0 * (cfg.w1 + cfg.w2);
    const PlanarImage lx =
        gradient_adjoint(gradient(u, GradientDirection::Horizontal), GradientDirection::Horizontal);
    const PlanarImage ly = gradient_adjoint(gradient(u, GradientDirection::Vertical), GradientDirection::Vertical);
    PlanarImage out(u.width(), u.height(), 1);
    auto o = out.plane(0);
    const auto p = u.plane(0);
    const auto x = lx.plane(0);
    const auto y = ly.plane(0);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * p[i] + beta * (x[i] + y[i]);
    return out;
}

void check_subproblem_inputs(const PlanarImage& data_target, const PlanarImage& color_target,
                             const SplitVariables& g, const SolverConfig& cfg, double beta) {
    const char* who = "solve_u_subproblem";
    if (data_target.channels() != 1) throw std::invalid_argument("solve_u_subproblem: data target must be one plane");
    require_plane(color_target, data_target, who, "color target");
    if (beta != 0.0) {
        require_plane(g.horizontal, data_target, who, "horizontal split variable");
        require_plane(g.vertical, data_target, who, "vertical split variable");
    }
    if (!(beta >= 0.0)) throw std::invalid_argument("solve_u_subproblem: beta must be >= 0");
    if (!(cfg.lambda0 * (cfg.w1 + cfg.w2) > 0.0))
        throw DegenerateSystemError("solve_u_subproblem: zero data weights leave the mean of u undetermined");
}

PlanarImage solve_with(detail::PeriodicScreenedPoisson& fft, const PlanarImage& data_target,
                       const PlanarImage& color_target, const SplitVariables& g, const SolverConfig& cfg,
                       double beta) {
    check_subproblem_inputs(data_target, color_target, g, cfg, beta);
    const double a = cfg.lambda0 * (cfg.w1 + cfg.w2);
    PlanarImage rhs = assemble_rhs(data_target, color_target, g, cfg, beta);
    PlanarImage u(data_target.width(), data_target.height(), 1, SampleDomain::LogDomain);
    if (beta == 0.0) {
        // no coupling: the weighted mean of the targets, formed without lambda0 so it is exact
        auto o = u.plane(0);
        const auto d = data_target.plane(0);
        const auto c = color_target.plane(0);
        const double wsum = cfg.w1 + cfg.w2;
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = (cfg.w1 * d[i] + cfg.w2 * c[i]) / wsum;
        return u;
    }
    fft.solve(rhs.plane(0), a, beta, u.plane(0));

    const double residual = u_subproblem_residual(u, data_target, color_target, g, cfg, beta);
    if (!(residual <= cfg.linear_solve_tol))
        throw std::runtime_error("solve_u_subproblem: relative residual " + std::to_string(residual) +
                                 " exceeds tolerance");
    return u;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

PlanarImage solve_u_subproblem(const PlanarImage& data_target, const PlanarImage& color_target,
                               const SplitVariables& gradient_targets, const SolverConfig& cfg, double beta) {
    detail::PeriodicScreenedPoisson fft(data_target.width(), data_target.height());
    return solve_with(fft, data_target, color_target, gradient_targets, cfg, beta);
}

double u_subproblem_residual(const PlanarImage& u, const PlanarImage& data_target, const PlanarImage& color_target,
                             const SplitVariables& gradient_targets, const SolverConfig& cfg, double beta) {
    const PlanarImage b = assemble_rhs(data_target, color_target, gradient_targets, cfg, beta);
    const PlanarImage au = apply_operator(u, cfg, beta);
    double diff = 0.0;
    const auto x = au.plane(0);
    const auto y = b.plane(0);
    for (std::size_t i = 0; i < x.size(); ++i) diff += (x[i] - y[i]) * (x[i] - y[i]);
    const double nb = l2_norm(y);
    return nb > 0.0 ? std::sqrt(diff) / nb : std::sqrt(diff);
}

PlanarImage inner_tv_solve(const PlanarImage& u_v, const PlanarImage& u_d, const PlanarImage& u_o,
                           const PlanarImage& u_nir, const SolverConfig& cfg) {
    const char* who = "inner_tv_solve";
    if (u_v.channels() != 1) throw std::invalid_argument("inner_tv_solve: u_v must be one plane");
    require_plane(u_d, u_v, who, "u_d");
    if (cfg.mode == RegularizerMode::ColorReg) {
        if (u_o.empty()) throw std::invalid_argument("inner_tv_solve: ColorReg mode requires the colored NIR plane");
        require_plane(u_o, u_v, who, "u_o");
    }
    if (cfg.mode == RegularizerMode::GradientDiff) {
        if (u_nir.empty()) throw std::invalid_argument("inner_tv_solve: GradientDiff mode requires the NIR plane");
        require_plane(u_nir, u_v, who, "u_nir");
    }

    const SolverConfig eff = cfg.effective();
    const int w = u_v.width();
    const int h = u_v.height();

    PlanarImage data_target(w, h, 1, SampleDomain::LogDomain);
    {
        auto t = data_target.plane(0);
        const auto v = u_v.plane(0);
        const auto d = u_d.plane(0);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = v[i] + d[i];
    }
    const PlanarImage color_target =
        cfg.mode == RegularizerMode::ColorReg ? u_o : PlanarImage(w, h, 1, SampleDomain::LogDomain);

    SplitVariables offset{PlanarImage(w, h, 1), PlanarImage(w, h, 1)};
    if (cfg.mode == RegularizerMode::GradientDiff)
        offset = {gradient(u_nir, GradientDirection::Horizontal), gradient(u_nir, GradientDirection::Vertical)};

    // Start from the beta = 0 solution: the weighted mean of the two targets.
    PlanarImage u(w, h, 1, SampleDomain::LogDomain);
    {
        auto p = u.plane(0);
        const auto a = data_target.plane(0);
        const auto b = color_target.plane(0);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = (eff.w1 * a[i] + eff.w2 * b[i]) / (eff.w1 + eff.w2);
    }

    detail::PeriodicScreenedPoisson fft(w, h);
    double beta = cfg.beta0;
    for (int k = 0; k < cfg.inner_iters; ++k) {
        SplitVariables targets{gradient(u, GradientDirection::Horizontal), gradient(u, GradientDirection::Vertical)};
        for (auto [plane, off] : {std::pair{&targets.horizontal, &offset.horizontal},
                                  std::pair{&targets.vertical, &offset.vertical}}) {
            auto t = plane->plane(0);
            const auto o = off->plane(0);
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = shrink(t[i] - o[i], 1.0 / beta) + o[i];
        }
        u = solve_with(fft, data_target, color_target, targets, eff, beta);
        beta *= cfg.beta_factor;
    }
    return u;
}

PlanarImage update_depth(const PlanarImage& u_s, const PlanarImage& u_v, const PlanarImage& u_d_prev,
                         double lambda3) {
    if (!(lambda3 > 0.0)) throw std::invalid_argument("update_depth: lambda3 must be > 0");
    if (u_s.channels() != 1) throw std::invalid_argument("update_depth: u_s must be one plane");
    require_plane(u_v, u_s, "update_depth", "u_v");
    require_plane(u_d_prev, u_s, "update_depth", "u_d_prev");
    PlanarImage out(u_s.width(), u_s.height(), 1, SampleDomain::LogDomain);
    auto o = out.plane(0);
    const auto s = u_s.plane(0);
    const auto v = u_v.plane(0);
    const auto d = u_d_prev.plane(0);
    const double inv = 1.0 / (1.0 + lambda3);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = ((s[i] - v[i]) + lambda3 * d[i]) * inv;
    return out;
}

ObjectiveTerms objective_terms(const PlanarImage& u_s, const PlanarImage& u_d, const PlanarImage& u_d_prev,
                               const PlanarImage& u_v, const PlanarImage& u_o, const PlanarImage& u_nir,
                               const SolverConfig& cfg) {
    const char* who = "objective_terms";
    if (u_s.channels() != 1) throw std::invalid_argument("objective_terms: u_s must be one plane");
    require_plane(u_d, u_s, who, "u_d");
    require_plane(u_d_prev, u_s, who, "u_d_prev");
    require_plane(u_v, u_s, who, "u_v");
    const SolverConfig eff = cfg.effective();
    const double lambda1 = eff.lambda0 * eff.w1 / 2.0;
    const double lambda2 = eff.lambda0 * eff.w2 / 2.0;

    ObjectiveTerms terms;
    const auto s = u_s.plane(0);
    const auto d = u_d.plane(0);
    const auto dp = u_d_prev.plane(0);
    const auto v = u_v.plane(0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = s[i] - (v[i] + d[i]);
        terms.data += r * r;
        const double q = d[i] - dp[i];
        terms.depth += q * q;
    }
    terms.data *= lambda1;
    terms.depth *= cfg.lambda3;

    if (cfg.mode == RegularizerMode::ColorReg) {
        require_plane(u_o, u_s, who, "u_o");
        const auto o = u_o.plane(0);
        for (std::size_t i = 0; i < s.size(); ++i) terms.color += (s[i] - o[i]) * (s[i] - o[i]);
        terms.color *= lambda2;
    }

    for (auto dir : {GradientDirection::Horizontal, GradientDirection::Vertical}) {
        const PlanarImage g = gradient(u_s, dir);
        const auto gp = g.plane(0);
        if (cfg.mode == RegularizerMode::GradientDiff) {
            require_plane(u_nir, u_s, who, "u_nir");
            const PlanarImage gn = gradient(u_nir, dir);
            const auto np = gn.plane(0);
            for (std::size_t i = 0; i < gp.size(); ++i) terms.gradient += std::abs(gp[i] - np[i]);
        } else {
            for (double x : gp) terms.gradient += std::abs(x);
        }
    }
    return terms;
}

double objective_value(const PlanarImage& u_s, const PlanarImage& u_d, const PlanarImage& u_d_prev,
                       const PlanarImage& u_v, const PlanarImage& u_o, const PlanarImage& u_nir,
                       const SolverConfig& cfg) {
    return objective_terms(u_s, u_d, u_d_prev, u_v, u_o, u_nir, cfg).total();
}

DehazeResult dehaze(const PlanarImage& vis, const PlanarImage& nir, const ColoringConfig& coloring_cfg,
                    const DarkChannelConfig& dark_cfg, const SolverConfig& solver_cfg,
                    std::optional<PlanarImage> colored_nir) {
    if (vis.channels() != 3 || nir.channels() != 1)
        throw std::invalid_argument("dehaze: expected a 3-channel visible and a 1-channel NIR image");
    if (!vis.same_size(nir)) throw std::invalid_argument("dehaze: visible and NIR sizes differ");
    coloring_cfg.validate();
    dark_cfg.validate();
    solver_cfg.validate();

    DehazeResult result;
    if (colored_nir) {
        if (colored_nir->channels() != 3 || !colored_nir->same_size(vis))
            throw std::invalid_argument("dehaze: colored NIR override must be RGB of the visible size");
        result.colored_nir = std::move(*colored_nir);
    } else if (solver_cfg.mode == RegularizerMode::ColorReg) {
        result.colored_nir = colorize(vis, nir, coloring_cfg);
    }
    result.haze = estimate_haze(vis, dark_cfg);
    const Airlight& a = result.haze.airlight;

    const PlanarImage u_v = to_log_domain(vis, a, dark_cfg.eps_log);
    const PlanarImage u_o =
        result.colored_nir.empty() ? PlanarImage() : to_log_domain(result.colored_nir, a, dark_cfg.eps_log);
    const PlanarImage u_nir = solver_cfg.mode == RegularizerMode::GradientDiff
                                  ? to_log_domain(nir, a, dark_cfg.eps_log)
                                  : PlanarImage();

    PlanarImage u_s(vis.width(), vis.height(), 3, SampleDomain::LogDomain);
    result.diagnostics.depth_log = PlanarImage(vis.width(), vis.height(), 3, SampleDomain::LogDomain);
    for (int c : solver_cfg.channel_order) {
        const PlanarImage uv_c = u_v.channel(c);
        const PlanarImage uo_c = u_o.empty() ? PlanarImage() : u_o.channel(c);
        const PlanarImage unir_c = u_nir.empty() ? PlanarImage() : u_nir.channel(c);
        PlanarImage ud_c = result.haze.depth_log;
        PlanarImage us_c;
        auto& log = result.diagnostics.objective[static_cast<std::size_t>(c)];
        log.clear();
        for (int t = 0; t < solver_cfg.t_max; ++t) {
            us_c = inner_tv_solve(uv_c, ud_c, uo_c, unir_c, solver_cfg);
            PlanarImage ud_next = update_depth(us_c, uv_c, ud_c, solver_cfg.lambda3);
            log.push_back(objective_value(us_c, ud_next, ud_c, uv_c, uo_c, unir_c, solver_cfg));
            ud_c = std::move(ud_next);
        }
        u_s.set_channel(c, us_c);
        result.diagnostics.depth_log.set_channel(c, ud_c);
    }
    result.restored = from_log_domain(u_s, a);
    return result;
}

}  // namespace nirdehaze
