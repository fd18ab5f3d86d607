#include "nirdehaze/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>
#include <vector>

#include "nirdehaze/colorspace.hpp"
#include "nirdehaze/png_io.hpp"

namespace nirdehaze::cli {

namespace {

struct Tunable {
    std::string name;
    std::variant<int*, double*> target;
    std::string help;
    bool coloring = false;  // also offered by `colorize`
};

std::vector<Tunable> tunables(RunConfig& cfg) {
    return {
        {"coloring-patch-size", &cfg.coloring.patch_size, "Patch size of the NIR-to-visible mapping fit", true},
        {"mu-c", &cfg.coloring.mu_c, "Pull of the mapping toward the contrast prior", true},
        {"eps-sigma", &cfg.coloring.eps_sigma, "Deviation floor of the contrast prior", true},
        {"eps-div", &cfg.coloring.eps_div, "Slope floor when dividing chroma", true},
        {"dark-patch-size", &cfg.dark.patch_size, "Dark channel patch size"},
        {"airlight-fraction", &cfg.dark.airlight_fraction, "Share of brightest dark-channel pixels averaged"},
        {"t-min", &cfg.dark.t_min, "Transmission floor"},
        {"eps-log", &cfg.dark.eps_log, "Floor on airlight minus sample before the log"},
        {"lambda0", &cfg.solver.lambda0, "Weight of the quadratic data terms"},
        {"w1", &cfg.solver.w1, "Share of lambda0 on the haze model term"},
        {"w2", &cfg.solver.w2, "Share of lambda0 on the color term"},
        {"lambda3", &cfg.solver.lambda3, "Depth regularisation weight"},
        {"t-max", &cfg.solver.t_max, "Outer iterations"},
        {"beta0", &cfg.solver.beta0, "Initial splitting penalty"},
        {"beta-factor", &cfg.solver.beta_factor, "Growth of the splitting penalty per inner round"},
        {"inner-iters", &cfg.solver.inner_iters, "Inner splitting rounds"},
        {"linear-solve-tol", &cfg.solver.linear_solve_tol, "Relative residual bound of each linear solve"},
    };
}

std::string normalize_key(std::string key) {
    for (char& ch : key)
        if (ch == '_') ch = '-';
    return key;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof())
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

Airlight parse_airlight(const std::string& text) {
    Airlight a{};
    std::istringstream in(text);
    std::string part;
    int k = 0;
    while (std::getline(in, part, ',')) {
        if (k == 3) throw std::invalid_argument("--airlight expects three comma-separated values");
        a[static_cast<std::size_t>(k++)] = parse_number<double>("airlight", trim(part));
    }
    if (k != 3) throw std::invalid_argument("--airlight expects three comma-separated values");
    return a;
}

std::optional<std::string> find_config_path(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return std::nullopt;
}

// Tracks files written by a command so a failure can remove them.
class OutputGuard {
public:
    void track(const std::filesystem::path& p) { paths_.push_back(p); }
    void commit() { paths_.clear(); }
    ~OutputGuard() {
        std::error_code ec;
        for (const auto& p : paths_) std::filesystem::remove(p, ec);
    }

private:
    std::vector<std::filesystem::path> paths_;
};

PlanarImage load_gray(const std::filesystem::path& path) {
    PlanarImage img = load_image(path);
    return img.channels() == 1 ? img : luma(img);
}

PlanarImage load_rgb(const std::filesystem::path& path) {
    PlanarImage img = load_image(path);
    if (img.channels() == 3) return img;
    const PlanarImage planes[3] = {img, img, img};
    return stack_channels(planes, SampleDomain::UnitInterval);
}

void write_objective_log(const DehazeDiagnostics& diag, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << "channel,iteration,objective\n";
    char line[96];
    for (int c = 0; c < 3; ++c) {
        const auto& values = diag.objective[static_cast<std::size_t>(c)];
        for (std::size_t t = 0; t < values.size(); ++t) {
            std::snprintf(line, sizeof(line), "%d,%zu,%.17g\n", c, t + 1, values[t]);
            out << line;
        }
    }
    if (!out) throw IoError(path.string() + ": write failed");
}

void run_dehaze(const RunConfig& cfg, OutputGuard& guard, std::ostream& out) {
    const PlanarImage vis = load_rgb(cfg.visible);
    const PlanarImage nir = load_gray(cfg.nir);
    std::optional<PlanarImage> colored;
    if (!cfg.colored_nir.empty()) colored = load_rgb(cfg.colored_nir);

    const DehazeResult result = dehaze(vis, nir, cfg.coloring, cfg.dark, cfg.solver, std::move(colored));
    guard.track(cfg.output);
    save_image(result.restored, cfg.output, cfg.bit_depth);

    if (cfg.diagnostics_dir) {
        const auto& dir = *cfg.diagnostics_dir;
        std::filesystem::create_directories(dir);
        guard.track(dir / "transmission.png");
        save_image(result.haze.transmission, dir / "transmission.png", 16);
        if (!result.colored_nir.empty()) {
            guard.track(dir / "colored_nir.png");
            save_image(result.colored_nir, dir / "colored_nir.png", cfg.bit_depth);
        }
        guard.track(dir / "objective.csv");
        write_objective_log(result.diagnostics, dir / "objective.csv");
    }
    char line[128];
    std::snprintf(line, sizeof(line), "airlight = %.6g,%.6g,%.6g\n", result.haze.airlight[0],
                  result.haze.airlight[1], result.haze.airlight[2]);
    out << line;
}

void run_evaluate(const RunConfig& cfg, OutputGuard& guard, std::ostream& out) {
    const PlanarImage test = load_rgb(cfg.test);
    const PlanarImage vis = load_rgb(cfg.visible);
    const PlanarImage nir = load_gray(cfg.nir);
    const RegionMask mask = load_mask(cfg.mask);
    if (!mask.matches(test)) throw std::invalid_argument("mask size does not match the test image");
    const std::string report = format_report(evaluate(test, vis, nir, mask));
    out << report;
    if (!cfg.output.empty()) {
        guard.track(cfg.output);
        std::ofstream f(cfg.output);
        f << report;
        if (!f) throw IoError(cfg.output.string() + ": write failed");
    }
}

}  // namespace

RegularizerMode parse_mode(const std::string& text) {
    if (text == "color") return RegularizerMode::ColorReg;
    if (text == "gradient") return RegularizerMode::GradientOnly;
    if (text == "graddiff") return RegularizerMode::GradientDiff;
    throw std::invalid_argument("unknown mode '" + text + "' (expected color, gradient or graddiff)");
}

void RunConfig::validate() const {
    auto need = [](const std::filesystem::path& p, const char* flag) {
        if (p.empty()) throw std::invalid_argument(std::string("missing required ") + flag);
    };
    need(output, "--out");
    switch (command) {
        case Command::Dehaze:
            need(visible, "--visible");
            need(nir, "--nir");
            solver.validate();
            dark.validate();
            coloring.validate();
            break;
        case Command::Colorize:
            need(visible, "--visible");
            need(nir, "--nir");
            coloring.validate();
            break;
        case Command::Synthesize:
            need(clean, "--clean");
            need(depth, "--depth");
            if (!(eta > 0.0)) throw std::invalid_argument("--eta must be > 0");
            if (!(max_depth > 0.0)) throw std::invalid_argument("--max-depth must be > 0");
            for (double a : airlight)
                if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("--airlight values must be in [0, 1]");
            break;
        case Command::Evaluate:
            need(test, "--test");
            need(visible, "--visible");
            need(nir, "--nir");
            need(mask, "--mask");
            break;
    }
    if (bit_depth != 8 && bit_depth != 16) throw std::invalid_argument("--bit-depth must be 8 or 16");
}

void apply_config_text(const std::string& text, RunConfig& cfg) {
    auto table = tunables(cfg);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

        if (key == "mode") {
            cfg.solver.mode = parse_mode(value);
            continue;
        }
        if (key == "airlight") {
            cfg.airlight = parse_airlight(value);
            continue;
        }
        if (key == "eta") {
            cfg.eta = parse_number<double>(key, value);
            continue;
        }
        if (key == "max-depth") {
            cfg.max_depth = parse_number<double>(key, value);
            continue;
        }
        if (key == "bit-depth") {
            cfg.bit_depth = parse_number<int>(key, value);
            continue;
        }
        auto it = std::ranges::find(table, key, &Tunable::name);
        if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
        std::visit([&](auto* p) { *p = parse_number<std::remove_pointer_t<decltype(p)>>(key, value); }, it->target);
    }
}

ParseResult parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    if (const auto path = find_config_path(argc, argv)) {
        std::ifstream f(*path);
        if (!f) {
            err << "error: cannot read config file " << *path << "\n";
            return {std::nullopt, kExitUsage};
        }
        std::stringstream text;
        text << f.rdbuf();
        try {
            apply_config_text(text.str(), cfg);
        } catch (const std::exception& e) {
            err << "error: " << *path << ": " << e.what() << "\n";
            return {std::nullopt, kExitUsage};
        }
    }

    CLI::App app{"Near-infrared guided dehazing with color regularization"};
    app.name("nirdehaze");
    app.require_subcommand(1);

    std::string config_unused;
    std::string mode_text;
    std::string airlight_text;
    std::string diagnostics_text;
    const auto table = tunables(cfg);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_unused, "Flat key = value file; flags override it");
        sub->add_option("--out", cfg.output, "Output path")->required();
    };
    auto add_tunables = [&](CLI::App* sub, bool coloring_only) {
        for (const auto& t : table) {
            if (coloring_only && !t.coloring) continue;
            std::visit([&](auto* p) { sub->add_option("--" + t.name, *p, t.help)->capture_default_str(); },
                       t.target);
        }
    };

    auto* dehaze_cmd = app.add_subcommand("dehaze", "Remove haze from a visible image using a paired NIR image");
    dehaze_cmd->add_option("--visible", cfg.visible, "Hazy visible RGB PNG")->required();
    dehaze_cmd->add_option("--nir", cfg.nir, "Near-infrared gray PNG")->required();
    dehaze_cmd->add_option("--colored-nir", cfg.colored_nir, "Use this RGB PNG instead of colorizing the NIR image");
    dehaze_cmd->add_option("--diagnostics", diagnostics_text, "Directory for transmission, colored NIR and objective log");
    dehaze_cmd->add_option("--mode", mode_text, "Regularizer: color, gradient or graddiff");
    dehaze_cmd->add_option("--bit-depth", cfg.bit_depth, "Bit depth of written images (8 or 16)");
    add_common(dehaze_cmd);
    add_tunables(dehaze_cmd, false);

    auto* colorize_cmd = app.add_subcommand("colorize", "Color the NIR image with colors from the visible image");
    colorize_cmd->add_option("--visible", cfg.visible, "Visible RGB PNG")->required();
    colorize_cmd->add_option("--nir", cfg.nir, "Near-infrared gray PNG")->required();
    colorize_cmd->add_option("--bit-depth", cfg.bit_depth, "Bit depth of written images (8 or 16)");
    add_common(colorize_cmd);
    add_tunables(colorize_cmd, true);

    auto* synth_cmd = app.add_subcommand("synthesize", "Render a hazy image from a clean image and a depth map");
    synth_cmd->add_option("--clean", cfg.clean, "Clean RGB PNG")->required();
    synth_cmd->add_option("--depth", cfg.depth, "Gray depth PNG, full scale = --max-depth")->required();
    synth_cmd->add_option("--airlight", airlight_text, "Airlight color r,g,b in [0, 1]");
    synth_cmd->add_option("--eta", cfg.eta, "Extinction coefficient")->capture_default_str();
    synth_cmd->add_option("--max-depth", cfg.max_depth, "Depth encoded by the PNG full scale")->capture_default_str();
    synth_cmd->add_option("--bit-depth", cfg.bit_depth, "Bit depth of written images (8 or 16)");
    add_common(synth_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "Compute ISS, CD and CF with a haze-region mask");
    eval_cmd->add_option("--test", cfg.test, "Dehazed RGB PNG")->required();
    eval_cmd->add_option("--visible", cfg.visible, "Visible reference RGB PNG")->required();
    eval_cmd->add_option("--nir", cfg.nir, "NIR reference gray PNG")->required();
    eval_cmd->add_option("--mask", cfg.mask, "Mask PNG, black = haze region")->required();
    add_common(eval_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return {std::nullopt, code == 0 ? kExitOk : kExitUsage};
    }

    try {
        if (dehaze_cmd->parsed()) cfg.command = Command::Dehaze;
        else if (colorize_cmd->parsed()) cfg.command = Command::Colorize;
        else if (synth_cmd->parsed()) cfg.command = Command::Synthesize;
        else cfg.command = Command::Evaluate;
        if (!mode_text.empty()) cfg.solver.mode = parse_mode(mode_text);
        if (!airlight_text.empty()) cfg.airlight = parse_airlight(airlight_text);
        if (!diagnostics_text.empty()) cfg.diagnostics_dir = diagnostics_text;
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return {std::nullopt, kExitUsage};
    }
    return {std::move(cfg), kExitOk};
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    OutputGuard guard;
    try {
        cfg.validate();
        switch (cfg.command) {
            case Command::Dehaze:
                run_dehaze(cfg, guard, out);
                break;
            case Command::Colorize: {
                const PlanarImage colored = colorize(load_rgb(cfg.visible), load_gray(cfg.nir), cfg.coloring);
                guard.track(cfg.output);
                save_image(colored, cfg.output, cfg.bit_depth);
                break;
            }
            case Command::Synthesize: {
                const PlanarImage clean = load_rgb(cfg.clean);
                const PlanarImage depth = load_depth(cfg.depth, cfg.max_depth);
                if (!depth.same_size(clean)) throw std::invalid_argument("depth and clean image sizes differ");
                guard.track(cfg.output);
                save_image(synthesize_haze(clean, depth, cfg.airlight, cfg.eta), cfg.output, cfg.bit_depth);
                break;
            }
            case Command::Evaluate:
                run_evaluate(cfg, guard, out);
                break;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    guard.commit();
    return kExitOk;
}

std::string format_report(const MetricReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "iss = %.6g\ncd = %.6g\ncf = %.6g\nhaze_pixels = %zu\nnonhaze_pixels = %zu\n",
                  report.iss, report.cd, report.cf, report.haze_pixel_count, report.nonhaze_pixel_count);
    return buf;
}

int main_entry(int argc, const char* const* argv) {
    ParseResult parsed = parse_command_line(argc, argv, std::cout, std::cerr);
    if (!parsed.config) return parsed.exit_code;
    return run(*parsed.config, std::cout, std::cerr);
}

}  // namespace nirdehaze::cli
