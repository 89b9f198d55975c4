#include "hw/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace hw::temporal {

void validate_sequence(const FrameSequence& seq) {
    if (!(seq.fps > 0.0)) throw std::invalid_argument("FrameSequence: fps must be positive");
    if (seq.frames.empty()) throw std::invalid_argument("FrameSequence: no frames");
    for (std::size_t i = 1; i < seq.frames.size(); ++i)
        if (seq.frames[i].index != seq.frames[i - 1].index + 1)
            throw std::invalid_argument("FrameSequence: irregular sampling (indices must be consecutive)");
}

namespace {
int window_frames(double window_seconds, double fps) {
    return static_cast<int>(std::lround(window_seconds * fps));
}
}  // namespace

ComplexCellPlan plan_even_nonoverlap(const FrameSequence& seq, double window_seconds,
                                     double truncate_seconds) {
    validate_sequence(seq);
    if (window_seconds < 0.0)
        throw std::invalid_argument("plan_even_nonoverlap: negative window");

    std::vector<FrameRef> frames = seq.frames;
    if (truncate_seconds > 0.0) {
        const int keep = window_frames(truncate_seconds, seq.fps);
        if (keep < 1 || frames.empty())
            throw std::invalid_argument("plan_even_nonoverlap: empty sequence after truncation");
        if (static_cast<int>(frames.size()) > keep) frames.resize(static_cast<std::size_t>(keep));
    }

    ComplexCellPlan plan;
    plan.placement = Placement::EvenNonOverlap;
    plan.window_seconds = window_seconds;

    // windowSeconds = 0 means "no pooling": a singleton cell per frame.
    const int w = window_seconds == 0.0 ? 1 : window_frames(window_seconds, seq.fps);
    if (w < 1) throw std::invalid_argument("plan_even_nonoverlap: window shorter than one frame");

    const int f = static_cast<int>(frames.size());
    for (int start = 0; start + w <= f; start += w) {
        ComplexCell cell;
        for (int i = 0; i < w; ++i)
            cell.slots.push_back({seq.video_id, frames[static_cast<std::size_t>(start + i)].index});
        plan.cells.push_back(std::move(cell));
    }
    if (plan.cells.empty())
        throw std::invalid_argument("plan_even_nonoverlap: sequence shorter than one window");
    return plan;
}

ComplexCellPlan plan_fixed_m(const FrameSequence& seq, double window_seconds, int m) {
    validate_sequence(seq);
    if (m < 1) throw std::invalid_argument("plan_fixed_m: m must be >= 1");
    const int w = window_frames(window_seconds, seq.fps);
    if (w < 1) throw std::invalid_argument("plan_fixed_m: window shorter than one frame");

    ComplexCellPlan plan;
    plan.placement = Placement::FixedM;
    plan.window_seconds = window_seconds;
    plan.m = m;

    const int f = static_cast<int>(seq.frames.size());
    for (int j = 0; j < m; ++j) {
        int start = 0;
        if (f > w && m > 1)
            start = static_cast<int>(std::lround(static_cast<double>(j) * (f - w) / (m - 1)));
        ComplexCell cell;
        for (int i = start; i < std::min(start + w, f); ++i)
            cell.slots.push_back({seq.video_id, seq.frames[static_cast<std::size_t>(i)].index});
        plan.cells.push_back(std::move(cell));
    }
    return plan;
}

std::vector<ComplexCellPlan> scramble_assignment(const std::vector<ComplexCellPlan>& plans,
                                                 std::uint64_t seed, bool per_video) {
    if (plans.empty()) throw std::invalid_argument("scramble_assignment: no plans");
    std::mt19937_64 rng(seed);

    auto scramble_group = [&rng](std::vector<ComplexCellPlan*>& group) {
        std::vector<FrameSlot> slots;
        for (ComplexCellPlan* plan : group)
            for (const ComplexCell& cell : plan->cells)
                slots.insert(slots.end(), cell.slots.begin(), cell.slots.end());
        std::shuffle(slots.begin(), slots.end(), rng);
        std::size_t next = 0;
        for (ComplexCellPlan* plan : group)
            for (ComplexCell& cell : plan->cells)
                for (FrameSlot& s : cell.slots) s = slots[next++];
    };

    std::vector<ComplexCellPlan> out = plans;
    if (per_video) {
        for (ComplexCellPlan& plan : out) {
            std::vector<ComplexCellPlan*> group{&plan};
            scramble_group(group);
        }
    } else {
        std::vector<ComplexCellPlan*> group;
        for (ComplexCellPlan& plan : out) group.push_back(&plan);
        scramble_group(group);
    }
    return out;
}

Layer3Model learn_layer3(const std::vector<FrameSequence>& videos,
                         const std::vector<ComplexCellPlan>& plans,
                         const Layer2Encoder& encoder) {
    std::map<std::string, const FrameSequence*> by_id;
    for (const auto& v : videos) by_id[v.video_id] = &v;

    Layer3Model model;
    int module_id = 0;
    std::size_t dim = 0;
    for (const ComplexCellPlan& plan : plans)
        for (const ComplexCell& cell : plan.cells) {
            hwcore::TemplateBook book;
            book.module_id = module_id++;
            for (const FrameSlot& slot : cell.slots) {
                auto it = by_id.find(slot.video_id);
                if (it == by_id.end())
                    throw std::invalid_argument("learn_layer3: plan references unknown video " +
                                                slot.video_id);
                std::vector<float> enc = encoder(slot.video_id, slot.frame);
                if (dim == 0) dim = enc.size();
                if (enc.size() != dim)
                    throw std::invalid_argument("learn_layer3: inconsistent encoding dimension");
                book.provenance.push_back(slot.video_id + ":" + std::to_string(slot.frame));
                book.templates.push_back(std::move(enc));
            }
            model.cells.push_back(std::move(book));
        }
    return model;
}

std::vector<float> encode_layer3(std::span<const float> l2vec, const Layer3Model& model) {
    std::vector<float> sig;
    sig.reserve(model.cells.size());
    for (const auto& book : model.cells) {
        std::vector<double> responses;
        responses.reserve(book.templates.size());
        for (const auto& t : book.templates) responses.push_back(hwcore::normalized_dot(l2vec, t));
        sig.push_back(static_cast<float>(hwcore::pool(responses, model.pooling)));
    }
    return sig;
}

}  // namespace hw::temporal
