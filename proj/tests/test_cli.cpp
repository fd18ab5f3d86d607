#include <doctest.h>

#include <fstream>
#include <sstream>
#include <vector>

#include "fixtures.hpp"
#include "nirdehaze/cli.hpp"
#include "nirdehaze/png_io.hpp"
#include "temp_dir.hpp"

using namespace nirdehaze;
using namespace nirdehaze::cli;
using namespace nirdehaze::testing;

namespace {

ParseResult parse(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "nirdehaze");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    ParseResult r = parse_command_line(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return r;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

}  // namespace

TEST_CASE("defaults match the documented values") {
    const RunConfig cfg;
    CHECK(cfg.solver.lambda0 == 1e5);
    CHECK(cfg.solver.w1 == 0.8);
    CHECK(cfg.solver.w2 == 0.2);
    CHECK(cfg.solver.lambda3 == 1.0);
    CHECK(cfg.solver.t_max == 7);
    CHECK(cfg.coloring.patch_size == 5);
    CHECK(cfg.dark.patch_size == 15);
}

TEST_CASE("dehaze command line") {
    const auto r = parse({"dehaze", "--visible", "v.png", "--nir", "n.png", "--out", "o.png", "--mode", "graddiff",
                          "--lambda0", "500", "--w1", "0.6", "--w2", "0.4", "--diagnostics", "diag"});
    REQUIRE(r.config);
    CHECK(r.config->command == Command::Dehaze);
    CHECK(r.config->visible == "v.png");
    CHECK(r.config->solver.mode == RegularizerMode::GradientDiff);
    CHECK(r.config->solver.lambda0 == 500.0);
    CHECK(r.config->solver.w2 == 0.4);
    REQUIRE(r.config->diagnostics_dir);
    CHECK(*r.config->diagnostics_dir == "diag");
}

TEST_CASE("usage errors exit with 1") {
    std::string err;
    CHECK(parse({"dehaze", "--visible", "v.png", "--out", "o.png"}, &err).exit_code == kExitUsage);
    CHECK(err.find("--nir") != std::string::npos);
    CHECK(parse({}).exit_code == kExitUsage);
    CHECK(parse({"bogus"}).exit_code == kExitUsage);
    CHECK(parse({"dehaze", "--visible", "v", "--nir", "n", "--out", "o", "--mode", "fancy"}).exit_code == kExitUsage);
    CHECK(parse({"dehaze", "--visible", "v", "--nir", "n", "--out", "o", "--w1", "0.9"}).exit_code == kExitUsage);
    CHECK(parse({"synthesize", "--clean", "c", "--depth", "d", "--out", "o", "--airlight", "1,2"}).exit_code ==
          kExitUsage);
    CHECK(parse({"dehaze", "--help"}).exit_code == kExitOk);
}

TEST_CASE("config file supplies defaults and flags win") {
    TempDir dir("cli");
    write_text(dir / "c.ini", "# tuned\nlambda0 = 2000\nw1 = 0.5\nw2 = 0.5\ninner_iters = 3\nmode = gradient\n"
                              "airlight = 0.8, 0.85, 0.9\n");
    const auto r = parse({"dehaze", "--config", (dir / "c.ini").string(), "--visible", "v", "--nir", "n", "--out",
                          "o", "--lambda0", "7"});
    REQUIRE(r.config);
    CHECK(r.config->solver.lambda0 == 7.0);
    CHECK(r.config->solver.w1 == 0.5);
    CHECK(r.config->solver.inner_iters == 3);
    CHECK(r.config->solver.mode == RegularizerMode::GradientOnly);
    CHECK(r.config->airlight == Airlight{0.8, 0.85, 0.9});

    write_text(dir / "bad.ini", "no_such_key = 1\n");
    CHECK(parse({"dehaze", "--config", (dir / "bad.ini").string(), "--visible", "v", "--nir", "n", "--out", "o"})
              .exit_code == kExitUsage);
    CHECK(parse({"dehaze", "--config", (dir / "missing.ini").string(), "--visible", "v", "--nir", "n", "--out", "o"})
              .exit_code == kExitUsage);
}

TEST_CASE("config text parsing") {
    RunConfig cfg;
    apply_config_text("mu-c = 0.25\n t_min=0.2 # floor\n\n[section]\neps_log = \"0.01\"\n", cfg);
    CHECK(cfg.coloring.mu_c == 0.25);
    CHECK(cfg.dark.t_min == 0.2);
    CHECK(cfg.dark.eps_log == 0.01);
    CHECK_THROWS_AS(apply_config_text("lambda0 = fast\n", cfg), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_text("lambda0\n", cfg), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_text("t-max = 2.5\n", cfg), std::invalid_argument);
}

TEST_CASE("mode names") {
    CHECK(parse_mode("color") == RegularizerMode::ColorReg);
    CHECK(parse_mode("gradient") == RegularizerMode::GradientOnly);
    CHECK(parse_mode("graddiff") == RegularizerMode::GradientDiff);
    CHECK_THROWS_AS(parse_mode("tv"), std::invalid_argument);
}

TEST_CASE("report format") {
    MetricReport r;
    r.iss = 0.93881234567;
    r.cd = 4.2215;
    r.cf = 12.96754321;
    r.haze_pixel_count = 10;
    r.nonhaze_pixel_count = 20;
    CHECK(format_report(r) == "iss = 0.938812\ncd = 4.2215\ncf = 12.9675\nhaze_pixels = 10\nnonhaze_pixels = 20\n");
}

TEST_CASE("run executes the workflows") {
    TempDir dir("cli");
    const auto scene = make_scene(32, 32, 5);
    save_image(scene.hazy, dir / "hazy.png");
    save_image(scene.nir, dir / "nir.png");
    save_image(scene.clean, dir / "clean.png");
    save_depth(scene.depth, dir / "depth.png", 4.0);
    PlanarImage mask_img(32, 32, 1, SampleDomain::UnitInterval);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) mask_img.at(0, y, x) = scene.mask.is_haze(y, x) ? 0.0 : 1.0;
    save_image(mask_img, dir / "mask.png");
    std::ostringstream out, err;

    RunConfig syn;
    syn.command = Command::Synthesize;
    syn.clean = dir / "clean.png";
    syn.depth = dir / "depth.png";
    syn.output = dir / "syn.png";
    CHECK(run(syn, out, err) == kExitOk);
    CHECK(max_abs_diff(load_image(dir / "syn.png"), scene.hazy) <= 2.0 / 255.0);

    RunConfig dh;
    dh.command = Command::Dehaze;
    dh.visible = dir / "hazy.png";
    dh.nir = dir / "nir.png";
    dh.output = dir / "out.png";
    dh.diagnostics_dir = dir / "diag";
    dh.solver.t_max = 2;
    CHECK(run(dh, out, err) == kExitOk);
    CHECK(std::filesystem::exists(dir / "out.png"));
    CHECK(std::filesystem::exists(dir / "diag" / "transmission.png"));
    CHECK(std::filesystem::exists(dir / "diag" / "colored_nir.png"));
    std::ifstream log(dir / "diag" / "objective.csv");
    std::string header;
    std::getline(log, header);
    CHECK(header == "channel,iteration,objective");

    RunConfig ev;
    ev.command = Command::Evaluate;
    ev.test = dir / "clean.png";
    ev.visible = dir / "clean.png";
    ev.nir = dir / "nir.png";
    ev.mask = dir / "mask.png";
    ev.output = dir / "report.txt";
    std::ostringstream report;
    CHECK(run(ev, report, err) == kExitOk);
    CHECK(report.str().find("cd = 0\n") != std::string::npos);

    RunConfig bad = dh;
    bad.nir = dir / "missing.png";
    bad.output = dir / "never.png";
    std::ostringstream bad_err;
    CHECK(run(bad, out, bad_err) == kExitFailure);
    CHECK(bad_err.str().find("missing.png") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "never.png"));

    RunConfig mismatch = ev;
    save_image(PlanarImage(8, 8, 1, SampleDomain::UnitInterval, 0.0), dir / "small_mask.png");
    mismatch.mask = dir / "small_mask.png";
    mismatch.output = dir / "report2.txt";
    CHECK(run(mismatch, out, err) == kExitFailure);
    CHECK_FALSE(std::filesystem::exists(dir / "report2.txt"));
}
