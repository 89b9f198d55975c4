#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hw/hwcore.hpp"

namespace hw::temporal {

struct FrameRef {
    int index = 0;
    std::string path;  // optional; experiments feed encodings directly
};

/// Ordered frames of one video at a constant sampling rate. Indices must be
/// consecutive; irregular sampling is rejected at construction.
struct FrameSequence {
    std::string video_id;
    double fps = 1.0;
    std::vector<FrameRef> frames;
};

void validate_sequence(const FrameSequence& seq);

struct FrameSlot {
    std::string video_id;
    int frame = 0;
};

/// After scrambling, one cell's slots may span several videos.
struct ComplexCell {
    std::vector<FrameSlot> slots;  // non-empty, within range
};

enum class Placement { EvenNonOverlap, FixedM };

struct ComplexCellPlan {
    std::vector<ComplexCell> cells;
    Placement placement = Placement::EvenNonOverlap;
    double window_seconds = 0.0;  // 0 encodes "no pooling"
    int m = 0;                    // FixedM only
};

/// Consecutive disjoint blocks of round(windowSeconds*fps) frames; trailing
/// remainder dropped. truncate_seconds <= 0 disables truncation.
ComplexCellPlan plan_even_nonoverlap(const FrameSequence& seq, double window_seconds,
                                     double truncate_seconds = 0.0);

/// Exactly m cells of round(windowSeconds*fps) frames spread evenly; overlap
/// and unused frames permitted; short videos clamp every cell to all frames.
ComplexCellPlan plan_fixed_m(const FrameSequence& seq, double window_seconds, int m);

/// Globally permutes the multiset of (video, frame) slots and re-deals them
/// into the same cell shapes. per_video restricts the permutation to each
/// plan's own slots.
std::vector<ComplexCellPlan> scramble_assignment(const std::vector<ComplexCellPlan>& plans,
                                                 std::uint64_t seed, bool per_video = false);

/// One template book per complex cell; templates are the layer-2 encodings of
/// the cell's member frames.
struct Layer3Model {
    std::vector<hwcore::TemplateBook> cells;
    hwcore::PoolingDescriptor pooling{hwcore::Pooling::Mean};
};

using Layer2Encoder = std::function<std::vector<float>(const std::string& video_id, int frame)>;

Layer3Model learn_layer3(const std::vector<FrameSequence>& videos,
                         const std::vector<ComplexCellPlan>& plans, const Layer2Encoder& encoder);

/// Per cell: cosine with each stored template, pooled to a scalar.
std::vector<float> encode_layer3(std::span<const float> l2vec, const Layer3Model& model);

}  // namespace hw::temporal
