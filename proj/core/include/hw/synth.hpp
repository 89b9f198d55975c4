#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hw/eval.hpp"
#include "hw/image.hpp"
#include "hw/temporal.hpp"

namespace hw::synth {

/// Procedurally generated identity: a sparse soft blob cut from smoothed
/// seeded noise, plus an alpha mask for compositing.
struct IdentitySpec {
    int id = 0;
    Image pattern;  // grayscale, [0,1]
    Image alpha;    // grayscale, [0,1], same size
};

enum class TransformKind { Translate, Rotate, Scale, Mixed };

struct TransformSpec {
    TransformKind kind = TransformKind::Mixed;
    double max_translate = 8.0;  // pixels, symmetric
    double max_rotate_deg = 30.0;
    double min_scale = 0.85;
    double max_scale = 1.15;
    // Number of monotone sweep legs per video: 1 is a single 0->1 pass,
    // larger values fold the sweep into a triangle wave so shorter temporal
    // windows still cover a useful fraction of the transform range.
    int sweep_cycles = 1;
};

enum class ClutterMode { Uniform, Clutter };

struct ClutterSpec {
    ClutterMode mode = ClutterMode::Uniform;
    float uniform_value = 0.25f;
};

/// Deterministic from (seed, id); resamples on near-duplicate patterns.
std::vector<IdentitySpec> gen_identities(int count, int size, std::uint64_t seed);

struct SynthVideo {
    std::string video_id;
    int identity = 0;
    double fps = 1.0;
    std::vector<Image> frames;
};

/// Frames sweep the transform parameters linearly; background fixed per
/// video (clutter mode) or constant (uniform mode).
SynthVideo render_video(const IdentitySpec& identity, const TransformSpec& transform,
                        const ClutterSpec& clutter, int canvas, double fps, double seconds,
                        std::uint64_t seed);

/// A single image of the identity at specific transform parameters (s in
/// [0,1] along the sweep) with its own background seed.
Image render_frame(const IdentitySpec& identity, const TransformSpec& transform,
                   const ClutterSpec& clutter, int canvas, double s, std::uint64_t bg_seed);

struct LabeledImage {
    std::string item_id;
    int identity = 0;
    Image image;
};

struct SynthDataset {
    std::vector<SynthVideo> train_videos;
    std::vector<LabeledImage> train_eval_images;  // held-out views of train identities
    std::vector<LabeledImage> test_images;        // views of held-out identities
    std::vector<eval::Pair> train_pairs;
    std::vector<eval::Pair> test_pairs;
    std::string manifest_json;
};

struct DatasetConfig {
    int n_train_ids = 20;
    int n_test_ids = 10;
    int pattern_size = 24;
    int canvas = 48;
    double fps = 1.0;
    double video_seconds = 60.0;
    int n_train_pairs = 100;
    int n_test_pairs = 100;
    TransformSpec transform;
    ClutterSpec clutter;
};

/// Train videos for the train identities plus balanced SAME/DIFFERENT pairs;
/// evaluation images always get a fresh per-image background.
SynthDataset gen_dataset(const DatasetConfig& cfg, std::uint64_t seed);

const LabeledImage& find_item(const SynthDataset& ds, const std::string& item_id);

}  // namespace hw::synth
