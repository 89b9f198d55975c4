#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "hw/temporal.hpp"

using namespace hw::temporal;
using hw::hwcore::Pooling;

namespace {

FrameSequence make_seq(const std::string& id, double fps, int n_frames, int first = 0) {
    FrameSequence seq;
    seq.video_id = id;
    seq.fps = fps;
    for (int i = 0; i < n_frames; ++i) seq.frames.push_back({first + i, ""});
    return seq;
}

int total_slots(const ComplexCellPlan& plan) {
    int n = 0;
    for (const auto& c : plan.cells) n += static_cast<int>(c.slots.size());
    return n;
}

}  // namespace

TEST_CASE("validate_sequence rejects bad input") {
    CHECK_THROWS(validate_sequence(make_seq("v", 0.0, 4)));
    CHECK_THROWS(validate_sequence(FrameSequence{"v", 1.0, {}}));
    FrameSequence gap = make_seq("v", 1.0, 4);
    gap.frames[2].index = 5;  // not consecutive
    CHECK_THROWS(validate_sequence(gap));
    CHECK_NOTHROW(validate_sequence(make_seq("v", 30.0, 4, 7)));
}

TEST_CASE("plan_even_nonoverlap: 60 frames at 1 fps, 10 s windows -> 6 cells of 10") {
    const auto plan = plan_even_nonoverlap(make_seq("v", 1.0, 60), 10.0);
    REQUIRE(plan.cells.size() == 6);
    for (const auto& c : plan.cells) CHECK(c.slots.size() == 10);
    // Blocks are consecutive and disjoint.
    CHECK(plan.cells[0].slots.front().frame == 0);
    CHECK(plan.cells[0].slots.back().frame == 9);
    CHECK(plan.cells[5].slots.front().frame == 50);
    CHECK(plan.cells[5].slots.back().frame == 59);
    for (const auto& c : plan.cells)
        for (const auto& s : c.slots) CHECK(s.video_id == "v");
}

TEST_CASE("plan_even_nonoverlap drops the trailing remainder") {
    const auto plan = plan_even_nonoverlap(make_seq("v", 1.0, 7), 2.0);
    REQUIRE(plan.cells.size() == 3);
    CHECK(total_slots(plan) == 6);  // frame 6 dropped
}

TEST_CASE("plan_even_nonoverlap window 0 -> singleton cells (no pooling)") {
    const auto plan = plan_even_nonoverlap(make_seq("v", 1.0, 5), 0.0);
    REQUIRE(plan.cells.size() == 5);
    for (std::size_t i = 0; i < plan.cells.size(); ++i) {
        REQUIRE(plan.cells[i].slots.size() == 1);
        CHECK(plan.cells[i].slots[0].frame == static_cast<int>(i));
    }
}

TEST_CASE("plan_even_nonoverlap truncation limits the frames used") {
    // 30 fps, 120 frames = 4 s; truncate to 2 s -> 60 frames -> 2 cells of 30.
    const auto plan = plan_even_nonoverlap(make_seq("v", 30.0, 120), 1.0, 2.0);
    REQUIRE(plan.cells.size() == 2);
    CHECK(plan.cells[1].slots.back().frame == 59);
}

TEST_CASE("plan_fixed_m spreads starts evenly") {
    // F=10, w=4, m=3: starts round(j*(10-4)/2) = 0, 3, 6.
    const auto plan = plan_fixed_m(make_seq("v", 1.0, 10), 4.0, 3);
    REQUIRE(plan.cells.size() == 3);
    CHECK(plan.cells[0].slots.front().frame == 0);
    CHECK(plan.cells[1].slots.front().frame == 3);
    CHECK(plan.cells[2].slots.front().frame == 6);
    for (const auto& c : plan.cells) CHECK(c.slots.size() == 4);
    CHECK(plan.placement == Placement::FixedM);
    CHECK(plan.m == 3);
}

TEST_CASE("plan_fixed_m clamps when the video is shorter than the window") {
    const auto plan = plan_fixed_m(make_seq("v", 1.0, 3), 5.0, 2);
    REQUIRE(plan.cells.size() == 2);
    for (const auto& c : plan.cells) {
        REQUIRE(c.slots.size() == 3);
        CHECK(c.slots.front().frame == 0);
        CHECK(c.slots.back().frame == 2);
    }
}

TEST_CASE("plan_fixed_m with m=1 takes one window at the start") {
    const auto plan = plan_fixed_m(make_seq("v", 1.0, 10), 4.0, 1);
    REQUIRE(plan.cells.size() == 1);
    CHECK(plan.cells[0].slots.front().frame == 0);
    CHECK(plan.cells[0].slots.size() == 4);
}

TEST_CASE("scramble_assignment preserves shapes and the slot multiset") {
    std::vector<ComplexCellPlan> plans;
    plans.push_back(plan_even_nonoverlap(make_seq("a", 1.0, 12), 3.0));
    plans.push_back(plan_even_nonoverlap(make_seq("b", 1.0, 9), 3.0));
    const auto scrambled = scramble_assignment(plans, 7);
    REQUIRE(scrambled.size() == plans.size());
    std::multiset<std::pair<std::string, int>> before, after;
    for (std::size_t p = 0; p < plans.size(); ++p) {
        REQUIRE(scrambled[p].cells.size() == plans[p].cells.size());
        for (std::size_t c = 0; c < plans[p].cells.size(); ++c) {
            CHECK(scrambled[p].cells[c].slots.size() == plans[p].cells[c].slots.size());
            for (const auto& s : plans[p].cells[c].slots) before.insert({s.video_id, s.frame});
            for (const auto& s : scrambled[p].cells[c].slots) after.insert({s.video_id, s.frame});
        }
    }
    CHECK(before == after);
    // Same seed reproduces, different seed differs.
    const auto again = scramble_assignment(plans, 7);
    const auto other = scramble_assignment(plans, 8);
    bool same = true, differs = false;
    for (std::size_t p = 0; p < plans.size(); ++p)
        for (std::size_t c = 0; c < plans[p].cells.size(); ++c)
            for (std::size_t i = 0; i < plans[p].cells[c].slots.size(); ++i) {
                const auto& x = scrambled[p].cells[c].slots[i];
                const auto& y = again[p].cells[c].slots[i];
                const auto& z = other[p].cells[c].slots[i];
                if (x.video_id != y.video_id || x.frame != y.frame) same = false;
                if (x.video_id != z.video_id || x.frame != z.frame) differs = true;
            }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("global scramble mixes videos; per-video scramble does not") {
    std::vector<ComplexCellPlan> plans;
    plans.push_back(plan_even_nonoverlap(make_seq("a", 1.0, 18), 3.0));
    plans.push_back(plan_even_nonoverlap(make_seq("b", 1.0, 18), 3.0));

    // Monte-Carlo oracle for the expected same-video pair fraction under a
    // uniform global permutation: within each 3-slot cell, count ordered
    // slot pairs sharing a video. 36 slots, 18 per video; P(same video) for
    // two distinct slots = 17/35.
    const double expect_same = 17.0 / 35.0;
    int same_pairs = 0, all_pairs = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto sc = scramble_assignment(plans, seed);
        for (const auto& plan : sc)
            for (const auto& cell : plan.cells)
                for (std::size_t i = 0; i < cell.slots.size(); ++i)
                    for (std::size_t j = i + 1; j < cell.slots.size(); ++j) {
                        ++all_pairs;
                        if (cell.slots[i].video_id == cell.slots[j].video_id) ++same_pairs;
                    }
    }
    const double frac = static_cast<double>(same_pairs) / all_pairs;
    CHECK(std::abs(frac - expect_same) < 0.04);

    const auto per_video = scramble_assignment(plans, 3, true);
    for (std::size_t p = 0; p < per_video.size(); ++p)
        for (const auto& cell : per_video[p].cells)
            for (const auto& s : cell.slots) CHECK(s.video_id == plans[p].cells[0].slots[0].video_id);
}

TEST_CASE("learn_layer3 stores the member frame encodings per cell") {
    const auto seq = make_seq("v", 1.0, 4);
    const auto plan = plan_even_nonoverlap(seq, 2.0);
    const Layer2Encoder enc = [](const std::string&, int frame) {
        return std::vector<float>{static_cast<float>(frame), 1.0f};
    };
    const auto model = learn_layer3({seq}, {plan}, enc);
    REQUIRE(model.cells.size() == 2);
    REQUIRE(model.cells[0].templates.size() == 2);
    CHECK(model.cells[0].templates[0][0] == 0.0f);
    CHECK(model.cells[0].templates[1][0] == 1.0f);
    CHECK(model.cells[1].templates[0][0] == 2.0f);
    CHECK(model.pooling.kind == Pooling::Mean);
}

TEST_CASE("encode_layer3 MEAN example") {
    Layer3Model model;
    hw::hwcore::TemplateBook cell;
    cell.templates = {{1.0f, 0.0f}, {0.0f, 1.0f}};
    model.cells.push_back(cell);
    model.pooling = {Pooling::Mean};
    const std::vector<float> x{1.0f, 1.0f};
    const auto out = encode_layer3(x, model);
    REQUIRE(out.size() == 1);
    // mean(cos45, cos45) = 1/sqrt(2)
    CHECK(out[0] == doctest::Approx(0.70710678).epsilon(1e-5));

    model.pooling = {Pooling::Max};
    const auto out_max = encode_layer3(x, model);
    CHECK(out_max[0] >= out[0] - 1e-7f);
}

TEST_CASE("learn_layer3 rejects inconsistent encoding dimensions") {
    const auto seq = make_seq("v", 1.0, 2);
    const auto plan = plan_even_nonoverlap(seq, 2.0);
    const Layer2Encoder enc = [](const std::string&, int frame) {
        return std::vector<float>(frame == 0 ? 2 : 3, 1.0f);
    };
    CHECK_THROWS(learn_layer3({seq}, {plan}, enc));
}
