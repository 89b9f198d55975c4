#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "hw/image.hpp"
#include "hw/image_io.hpp"

using namespace hw;
using namespace hw::imagecore;

TEST_CASE("to_grayscale uses ITU-R 601 weights") {
    Image white(2, 2, 3, 1.0f);
    const Image g = to_grayscale(white);
    CHECK(g.channels == 1);
    CHECK(g.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));

    Image red(1, 1, 3);
    red.at(0, 0, 0) = 1.0f;
    CHECK(to_grayscale(red).at(0, 0, 0) == doctest::Approx(0.299).epsilon(1e-6));

    Image gray(3, 2, 1, 0.5f);
    const Image same = to_grayscale(gray);
    CHECK(same.data == gray.data);
}

TEST_CASE("resize identity and constants") {
    Image img(5, 4, 1);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(i) / 20.0f;
    CHECK(resize(img, 5, 4).data == img.data);

    Image c(7, 3, 1, 0.42f);
    const Image big = resize(c, 13, 9);
    for (float v : big.data) CHECK(v == doctest::Approx(0.42).epsilon(1e-6));
}

TEST_CASE("resize 2x1 [0,1] to 4x1 is monotone non-decreasing") {
    Image img(2, 1, 1);
    img.at(1, 0, 0) = 1.0f;
    const Image up = resize(img, 4, 1);
    for (int x = 1; x < 4; ++x) CHECK(up.at(x, 0, 0) >= up.at(x - 1, 0, 0));
    // Hand evaluation of the half-pixel-centered bilinear map:
    // target centers map to source x in {-0.25, 0.25, 0.75, 1.25} -> clamped
    // interpolation gives {0, 0.25, 0.75, 1}.
    CHECK(up.at(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(up.at(1, 0, 0) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(up.at(2, 0, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(up.at(3, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("resize errors on non-positive target") {
    Image img(2, 2, 1);
    CHECK_THROWS_AS(resize(img, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(resize(img, 2, -1), std::invalid_argument);
}

TEST_CASE("resize and grayscale preserve [0,1]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    Image img(17, 11, 3);
    for (float& v : img.data) v = uni(rng);
    for (const Image& out : {resize(img, 7, 23), resize(img, 31, 5), to_grayscale(img)})
        for (float v : out.data) {
            CHECK(v >= -1e-6f);
            CHECK(v <= 1.0f + 1e-6f);
        }
}

TEST_CASE("build_pyramid level dimensions") {
    Image img(400, 300, 1, 0.5f);
    const Pyramid pyr = build_pyramid(img, {0.5, 1.0});
    REQUIRE(pyr.levels.size() == 2);
    CHECK(pyr.levels[0].image.width == 200);
    CHECK(pyr.levels[0].image.height == 150);
    CHECK(pyr.levels[1].image.width == 400);
    CHECK(pyr.levels[1].image.height == 300);
}

TEST_CASE("build_pyramid with ratio 1.0 only is bit-identical") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    Image img(13, 9, 1);
    for (float& v : img.data) v = uni(rng);
    const Pyramid pyr = build_pyramid(img, {1.0});
    REQUIRE(pyr.levels.size() == 1);
    CHECK(pyr.levels[0].image.data == img.data);
}

TEST_CASE("build_pyramid heights for the 3-scale animal settings") {
    Image img(300, 231, 1);
    const Pyramid pyr = build_pyramid(img, {0.8, 0.9, 1.0});
    CHECK(pyr.levels[0].image.height == 185);
    CHECK(pyr.levels[1].image.height == 208);
    CHECK(pyr.levels[2].image.height == 231);
}

TEST_CASE("build_pyramid rejects bad ratio lists") {
    Image img(8, 8, 1);
    CHECK_THROWS_AS(build_pyramid(img, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_pyramid(img, {0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_pyramid(img, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(build_pyramid(img, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("down-up resize error small on smooth gradients") {
    const int w = 32, h = 24;
    Image img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(x, y, 0) = 0.5f + 0.4f * (static_cast<float>(x) / w - 0.5f) +
                              0.3f * (static_cast<float>(y) / h - 0.5f);
    const Image restored = resize(resize(img, 2 * w, 2 * h), w, h);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(std::fabs(restored.data[i] - img.data[i]) <= 0.05f);
}

TEST_CASE("resize_to_height preserves aspect ratio") {
    Image img(300, 200, 1);
    const Image out = resize_to_height(img, 400);
    CHECK(out.height == 400);
    CHECK(out.width == 600);
}

TEST_CASE("PGM round trip") {
    const auto path = std::filesystem::temp_directory_path() / "hw_test_roundtrip.pgm";
    Image img(9, 5, 1);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<float>(i % 256) / 255.0f;
    save_pgm(img, path.string());
    const Image back = load_image(path.string());
    REQUIRE(back.width == 9);
    REQUIRE(back.height == 5);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-6));
    std::filesystem::remove(path);
}

namespace {
// An 8x8 RGB PNG with pixel (x,y) = (30x, 30y, 15(x+y)).
const unsigned char kTinyPng[] = {
    137, 80, 78, 71, 13, 10, 26, 10, 0, 0, 0, 13, 73, 72, 68, 82, 0, 0, 0, 8, 0, 0, 0, 8,
    8, 2, 0, 0, 0, 75, 109, 41, 220, 0, 0, 0, 27, 73, 68, 65, 84, 120, 156, 99, 100, 96,
    96, 144, 99, 224, 199, 68, 44, 12, 114, 252, 12, 12, 88, 208, 224, 148, 0, 0, 94, 29,
    5, 115, 83, 184, 187, 5, 0, 0, 0, 0, 73, 69, 78, 68, 174, 66, 96, 130};
}  // namespace

TEST_CASE("PNG decoding") {
    const auto path = std::filesystem::temp_directory_path() / "hw_test_tiny.png";
    {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(kTinyPng), sizeof(kTinyPng));
    }
    const Image img = load_image(path.string());
    REQUIRE(img.width == 8);
    REQUIRE(img.height == 8);
    REQUIRE(img.channels == 3);
    CHECK(img.at(3, 2, 0) == doctest::Approx(90.0 / 255.0).epsilon(1e-6));
    CHECK(img.at(3, 2, 1) == doctest::Approx(60.0 / 255.0).epsilon(1e-6));
    CHECK(img.at(3, 2, 2) == doctest::Approx(75.0 / 255.0).epsilon(1e-6));
    std::filesystem::remove(path);
}
