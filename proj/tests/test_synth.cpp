#include <cmath>
#include <set>

#include "doctest.h"
#include "hw/hwcore.hpp"
#include "hw/synth.hpp"

using namespace hw::synth;
using hw::Image;

namespace {

double image_cosine(const Image& a, const Image& b) {
    return hw::hwcore::normalized_dot(a.data, b.data);
}

bool images_equal(const Image& a, const Image& b) { return a.data == b.data; }

}  // namespace

TEST_CASE("gen_identities is deterministic and produces distinct sparse patterns") {
    const auto ids = gen_identities(30, 24, 42);
    const auto again = gen_identities(30, 24, 42);
    REQUIRE(ids.size() == 30);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        CHECK(ids[i].id == static_cast<int>(i));
        CHECK(images_equal(ids[i].pattern, again[i].pattern));
        CHECK(ids[i].pattern.width == 24);
        CHECK(ids[i].alpha.width == 24);
        for (float v : ids[i].pattern.data) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
        // Non-degenerate.
        double sq = 0.0;
        for (float v : ids[i].pattern.data) sq += static_cast<double>(v) * v;
        CHECK(sq > 0.0);
    }
    // Patterns must not look alike: the thresholding keeps them sparse, so
    // the mean pairwise cosine stays well below 0.5.
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            sum += image_cosine(ids[i].pattern, ids[j].pattern);
            ++n;
        }
    CHECK(sum / n < 0.5);

    const auto other = gen_identities(3, 24, 43);
    CHECK(!images_equal(other[0].pattern, ids[0].pattern));
}

TEST_CASE("render_frame uniform background is constant away from the pattern") {
    const auto ids = gen_identities(1, 16, 7);
    ClutterSpec uniform;
    uniform.mode = ClutterMode::Uniform;
    uniform.uniform_value = 0.25f;
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.max_translate = 2.0;
    const Image frame = render_frame(ids[0], t, uniform, 48, 0.5, 99);
    CHECK(frame.width == 48);
    CHECK(frame.height == 48);
    // Corners are far from the centered 16px pattern.
    CHECK(frame.at(0, 0, 0) == doctest::Approx(0.25f));
    CHECK(frame.at(47, 47, 0) == doctest::Approx(0.25f));
    // The pattern actually shows up somewhere.
    bool differs = false;
    for (float v : frame.data)
        if (std::abs(v - 0.25f) > 1e-4f) differs = true;
    CHECK(differs);
}

TEST_CASE("render_frame rejects transforms that push the pattern off canvas") {
    const auto ids = gen_identities(1, 24, 7);
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.max_translate = 100.0;
    ClutterSpec uniform;
    CHECK_THROWS(render_frame(ids[0], t, uniform, 32, 1.0, 0));
}

TEST_CASE("clutter background is fixed within a video, fresh across videos") {
    const auto ids = gen_identities(2, 12, 3);
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.max_translate = 4.0;
    ClutterSpec clutter;
    clutter.mode = ClutterMode::Clutter;
    const auto v0 = render_video(ids[0], t, clutter, 40, 1.0, 8.0, 100);
    const auto v1 = render_video(ids[0], t, clutter, 40, 1.0, 8.0, 101);
    REQUIRE(v0.frames.size() == 8);
    // A corner pixel untouched by the 12px pattern: identical across frames
    // of one video, different between videos.
    const float c0 = v0.frames[0].at(0, 0, 0);
    for (const auto& f : v0.frames) CHECK(f.at(0, 0, 0) == c0);
    CHECK(v1.frames[0].at(0, 0, 0) != c0);
    // Clutter is not a constant field.
    std::set<float> corner_vals;
    for (int x = 0; x < 5; ++x) corner_vals.insert(v0.frames[0].at(x, 0, 0));
    CHECK(corner_vals.size() > 1);
}

TEST_CASE("render_video sweeps the transform smoothly and deterministically") {
    const auto ids = gen_identities(1, 12, 9);
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.max_translate = 6.0;
    ClutterSpec uniform;
    const auto video = render_video(ids[0], t, uniform, 40, 2.0, 5.0, 55);
    REQUIRE(video.frames.size() == 10);
    CHECK(video.fps == 2.0);
    const auto again = render_video(ids[0], t, uniform, 40, 2.0, 5.0, 55);
    for (std::size_t i = 0; i < video.frames.size(); ++i)
        CHECK(images_equal(video.frames[i], again.frames[i]));
    // Endpoints of the sweep differ (pattern moved).
    CHECK(!images_equal(video.frames.front(), video.frames.back()));
}

TEST_CASE("gen_dataset: balanced pairs, disjoint identity splits, determinism") {
    DatasetConfig cfg;
    cfg.n_train_ids = 6;
    cfg.n_test_ids = 4;
    cfg.pattern_size = 12;
    cfg.canvas = 32;
    cfg.video_seconds = 6.0;
    cfg.n_train_pairs = 40;
    cfg.n_test_pairs = 40;
    cfg.transform.kind = TransformKind::Translate;
    cfg.transform.max_translate = 4.0;
    const auto ds = gen_dataset(cfg, 77);

    REQUIRE(ds.train_videos.size() == 6);
    for (const auto& v : ds.train_videos) CHECK(v.frames.size() == 6);

    auto count_same = [](const std::vector<hw::eval::Pair>& pairs) {
        int same = 0;
        for (const auto& p : pairs)
            if (p.label == hw::eval::PairLabel::Same) ++same;
        return same;
    };
    REQUIRE(ds.train_pairs.size() == 40);
    REQUIRE(ds.test_pairs.size() == 40);
    CHECK(count_same(ds.train_pairs) == 20);
    CHECK(count_same(ds.test_pairs) == 20);

    // SAME pairs really share an identity; DIFFERENT pairs do not.
    for (const auto& p : ds.test_pairs) {
        const auto& a = find_item(ds, p.item_a);
        const auto& b = find_item(ds, p.item_b);
        if (p.label == hw::eval::PairLabel::Same)
            CHECK(a.identity == b.identity);
        else
            CHECK(a.identity != b.identity);
    }

    // Train-eval and test images use disjoint identity sets.
    std::set<int> train_ids, test_ids;
    for (const auto& img : ds.train_eval_images) train_ids.insert(img.identity);
    for (const auto& img : ds.test_images) test_ids.insert(img.identity);
    for (int id : test_ids) CHECK(train_ids.count(id) == 0);

    const auto again = gen_dataset(cfg, 77);
    CHECK(ds.manifest_json == again.manifest_json);
    REQUIRE(again.test_images.size() == ds.test_images.size());
    for (std::size_t i = 0; i < ds.test_images.size(); ++i)
        CHECK(images_equal(ds.test_images[i].image, again.test_images[i].image));
    CHECK(!ds.manifest_json.empty());
}

TEST_CASE("find_item throws on unknown ids") {
    DatasetConfig cfg;
    cfg.n_train_ids = 2;
    cfg.n_test_ids = 2;
    cfg.pattern_size = 12;
    cfg.canvas = 32;
    cfg.video_seconds = 3.0;
    cfg.n_train_pairs = 4;
    cfg.n_test_pairs = 4;
    cfg.transform.kind = TransformKind::Translate;
    cfg.transform.max_translate = 2.0;
    const auto ds = gen_dataset(cfg, 1);
    CHECK_THROWS(find_item(ds, "nope"));
    CHECK_NOTHROW(find_item(ds, ds.test_pairs[0].item_a));
}

TEST_CASE("signature of a transformed orbit beats raw-pixel matching under translation") {
    // A MAX-pooled book of video frames should score a shifted held-out view
    // of the same identity above a raw single-frame comparison baseline.
    const auto ids = gen_identities(2, 12, 21);
    TransformSpec t;
    t.kind = TransformKind::Translate;
    t.max_translate = 6.0;
    ClutterSpec uniform;
    const auto video = render_video(ids[0], t, uniform, 40, 1.0, 12.0, 5);
    hw::hwcore::TemplateBook book;
    for (const auto& f : video.frames) book.templates.push_back(f.data);
    const hw::hwcore::PoolingDescriptor maxpool{hw::hwcore::Pooling::Max};

    const Image probe_same = render_frame(ids[0], t, uniform, 40, 0.37, 1234);
    const Image probe_diff = render_frame(ids[1], t, uniform, 40, 0.37, 1234);
    const auto s_same = hw::hwcore::signature(probe_same.data, {{book, maxpool}});
    const auto s_diff = hw::hwcore::signature(probe_diff.data, {{book, maxpool}});
    CHECK(s_same[0] > s_diff[0]);
}
