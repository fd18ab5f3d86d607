#include <doctest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "nirdehaze/png_io.hpp"
#include "temp_dir.hpp"

using namespace nirdehaze;
using namespace nirdehaze::testing;

TEST_CASE("round trip stays within the quantisation bound") {
    TempDir dir("png");
    std::mt19937_64 rng(1);
    for (int depth : {8, 16})
        for (int channels : {1, 3}) {
            const PlanarImage img = random_image(23, 17, channels, rng);
            const auto path = dir / ("rt" + std::to_string(depth) + "_" + std::to_string(channels) + ".png");
            save_image(img, path, depth);
            const PlanarImage back = load_image(path);
            REQUIRE(back.channels() == channels);
            REQUIRE(back.same_size(img));
            CHECK(back.domain() == SampleDomain::UnitInterval);
            CHECK(max_abs_diff(back, img) <= 1.0 / (2.0 * ((1 << depth) - 1)) + 1e-12);
        }
}

TEST_CASE("extreme codes map to 0 and 1") {
    TempDir dir("png");
    PlanarImage img(2, 1, 1, SampleDomain::UnitInterval);
    set_samples(img, {0.0, 1.0});
    for (int depth : {8, 16}) {
        save_image(img, dir / "e.png", depth);
        const PlanarImage back = load_image(dir / "e.png");
        CHECK(back.data()[0] == 0.0);
        CHECK(back.data()[1] == 1.0);
    }
    PlanarImage out_of_range(2, 1, 1, SampleDomain::Unbounded);
    set_samples(out_of_range, {-0.5, 3.0});
    save_image(out_of_range, dir / "c.png");
    CHECK(samples(load_image(dir / "c.png")) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("saving is deterministic") {
    TempDir dir("png");
    std::mt19937_64 rng(2);
    const PlanarImage img = random_image(31, 9, 3, rng);
    save_image(img, dir / "a.png");
    save_image(img, dir / "b.png");
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    CHECK(slurp(dir / "a.png") == slurp(dir / "b.png"));
}

TEST_CASE("load errors name the file") {
    TempDir dir("png");
    const auto missing = dir / "nope.png";
    CHECK_THROWS_AS(load_image(missing), IoError);
    try {
        load_image(missing);
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("nope.png") != std::string::npos);
    }
    {
        std::ofstream f(dir / "junk.png", std::ios::binary);
        f << "definitely not a png file";
    }
    CHECK_THROWS_AS(load_image(dir / "junk.png"), IoError);
    {
        // valid signature, truncated body
        std::ofstream f(dir / "trunc.png", std::ios::binary);
        f << "\x89PNG\r\n\x1a\n" << std::string("\0\0\0\x0dIHDR", 8);
    }
    CHECK_THROWS_AS(load_image(dir / "trunc.png"), IoError);
    CHECK_THROWS_AS(save_image(PlanarImage(2, 2, 3), dir / "no_such_dir" / "x.png"), IoError);
    CHECK_THROWS_AS(save_image(PlanarImage(2, 2, 2), dir / "x.png"), std::invalid_argument);
    CHECK_THROWS_AS(save_image(PlanarImage(2, 2, 3), dir / "x.png", 12), std::invalid_argument);
}

TEST_CASE("mask threshold") {
    PlanarImage g(4, 1, 1, SampleDomain::UnitInterval);
    set_samples(g, {0.0, 0.49, 0.51, 1.0});
    const RegionMask m = mask_from_image(g);
    CHECK(m.is_haze(0));
    CHECK(m.is_haze(1));
    CHECK_FALSE(m.is_haze(2));
    CHECK_FALSE(m.is_haze(3));

    TempDir dir("png");
    PlanarImage checker(6, 4, 1, SampleDomain::UnitInterval);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) checker.at(0, y, x) = (x + y) % 2 ? 1.0 : 0.0;
    save_image(checker, dir / "m.png");
    const RegionMask cm = load_mask(dir / "m.png");
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) CHECK(cm.is_haze(y, x) == ((x + y) % 2 == 0));

    PlanarImage rgb(1, 1, 3, SampleDomain::UnitInterval);
    set_samples(rgb, {0.2, 0.3, 0.4});
    CHECK(mask_from_image(rgb).is_haze(0));
}

TEST_CASE("depth maps scale by the declared maximum") {
    TempDir dir("png");
    std::mt19937_64 rng(3);
    const PlanarImage depth = random_image(10, 10, 1, rng, 0.0, 4.0, SampleDomain::Unbounded);
    save_depth(depth, dir / "d.png", 4.0);
    const PlanarImage back = load_depth(dir / "d.png", 4.0);
    CHECK(max_abs_diff(back, depth) <= 4.0 / (2.0 * 65535.0) + 1e-12);
    CHECK_THROWS_AS(load_depth(dir / "d.png", 0.0), std::invalid_argument);
}
