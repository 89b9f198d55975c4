#pragma once

#include <cstdint>
#include <vector>

#include "hw/synth.hpp"

namespace hw::experiments {

/// Desk-scale protocol defaults shared by the clutter, pooling-range, and
/// scrambled-frame experiments.
struct TrendConfig {
    int n_train_ids = 20;
    int n_test_ids = 10;
    int pattern_size = 24;
    int canvas = 48;
    double fps = 1.0;
    double video_seconds = 60.0;
    int n_train_pairs = 100;
    int n_test_pairs = 100;
    synth::TransformSpec transform{synth::TransformKind::Mixed, 6.0, 25.0, 1.0, 1.0, 8};
    // Per-pixel sensor noise added to the developmental frames of the
    // temporal experiments; pooling over a window averages it out.
    double frame_noise_sd = 0.08;
};

struct ClutterResult {
    double pixel_accuracy = 0.0;
    double pooled_uniform_accuracy = 0.0;
    double pooled_clutter_accuracy = 0.0;
};

/// Per-identity template books from training videos, thresholded-cosine
/// verification; pixel baseline scores raw images directly (clutter
/// condition).
ClutterResult run_clutter_experiment(std::uint64_t seed, const TrendConfig& cfg);

/// Accuracy per pooling window; window_seconds = 0 means no pooling.
std::vector<double> run_pooling_sweep(std::uint64_t seed, const std::vector<double>& windows,
                                      const TrendConfig& cfg);

struct ScrambleResult {
    double intact_accuracy = 0.0;
    double no_pooling_accuracy = 0.0;
    double scrambled_accuracy = 0.0;
};

/// 10-second pooling vs no pooling vs 10-second pooling over globally
/// scrambled frame assignments.
ScrambleResult run_scramble_control(std::uint64_t seed, const TrendConfig& cfg,
                                    double window_seconds = 10.0);

}  // namespace hw::experiments
