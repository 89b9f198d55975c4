#include "hw/experiments.hpp"

#include <map>
#include <random>

#include "hw/eval.hpp"
#include "hw/temporal.hpp"

namespace hw::experiments {

namespace {

// Flattened grayscale with the image mean removed: the shared background
// level would otherwise dominate every cosine and mask identity structure.
std::vector<float> flatten_gray(const Image& img) {
    const Image gray = img.channels == 1 ? img : imagecore::to_grayscale(img);
    std::vector<float> v = gray.data;
    double mean = 0.0;
    for (float x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (float& x : v) x = static_cast<float>(x - mean);
    return v;
}

synth::DatasetConfig dataset_config(const TrendConfig& cfg, synth::ClutterMode mode) {
    synth::DatasetConfig dc;
    dc.n_train_ids = cfg.n_train_ids;
    dc.n_test_ids = cfg.n_test_ids;
    dc.pattern_size = cfg.pattern_size;
    dc.canvas = cfg.canvas;
    dc.fps = cfg.fps;
    dc.video_seconds = cfg.video_seconds;
    dc.n_train_pairs = cfg.n_train_pairs;
    dc.n_test_pairs = cfg.n_test_pairs;
    dc.transform = cfg.transform;
    dc.clutter.mode = mode;
    return dc;
}

double pair_accuracy(const std::map<std::string, std::vector<float>>& sigs,
                     const std::vector<eval::Pair>& train_pairs,
                     const std::vector<eval::Pair>& test_pairs) {
    auto score = [&](const std::vector<eval::Pair>& pairs) {
        std::vector<eval::ScoredPair> scored;
        scored.reserve(pairs.size());
        for (const auto& p : pairs)
            scored.push_back({eval::pair_score(sigs.at(p.item_a), sigs.at(p.item_b)), p.label});
        return scored;
    };
    const eval::ThresholdModel model = eval::fit_threshold(score(train_pairs));
    return eval::verify(score(test_pairs), model).accuracy;
}

// Per-identity books of raw frame vectors, MAX pooling (the one-layer model).
double pooled_accuracy(const synth::SynthDataset& ds) {
    std::vector<std::pair<hwcore::TemplateBook, hwcore::PoolingDescriptor>> modules;
    for (const auto& video : ds.train_videos) {
        hwcore::TemplateBook book;
        book.module_id = video.identity;
        for (const auto& frame : video.frames) book.templates.push_back(flatten_gray(frame));
        modules.emplace_back(std::move(book), hwcore::PoolingDescriptor{hwcore::Pooling::Max});
    }
    std::map<std::string, std::vector<float>> sigs;
    for (const auto& li : ds.train_eval_images)
        sigs[li.item_id] = hwcore::signature(flatten_gray(li.image), modules);
    for (const auto& li : ds.test_images)
        sigs[li.item_id] = hwcore::signature(flatten_gray(li.image), modules);
    return pair_accuracy(sigs, ds.train_pairs, ds.test_pairs);
}

double pixel_accuracy(const synth::SynthDataset& ds) {
    std::map<std::string, std::vector<float>> sigs;
    for (const auto& li : ds.train_eval_images) sigs[li.item_id] = flatten_gray(li.image);
    for (const auto& li : ds.test_images) sigs[li.item_id] = flatten_gray(li.image);
    return pair_accuracy(sigs, ds.train_pairs, ds.test_pairs);
}

temporal::FrameSequence sequence_of(const synth::SynthVideo& video) {
    temporal::FrameSequence seq;
    seq.video_id = video.video_id;
    seq.fps = video.fps;
    for (int i = 0; i < static_cast<int>(video.frames.size()); ++i)
        seq.frames.push_back({i, ""});
    return seq;
}

double layer3_accuracy(const synth::SynthDataset& ds,
                       const std::vector<temporal::ComplexCellPlan>& plans, double noise_sd,
                       std::uint64_t noise_seed) {
    std::map<std::string, const synth::SynthVideo*> videos;
    for (const auto& v : ds.train_videos) videos[v.video_id] = &v;
    std::vector<temporal::FrameSequence> seqs;
    for (const auto& v : ds.train_videos) seqs.push_back(sequence_of(v));

    const temporal::Layer2Encoder encoder = [&](const std::string& video_id, int frame) {
        std::vector<float> v =
            flatten_gray(videos.at(video_id)->frames.at(static_cast<std::size_t>(frame)));
        if (noise_sd > 0.0) {
            // Sensor noise on the developmental stream, keyed by the frame
            // slot so every plan sees the same corrupted frame.
            std::mt19937_64 rng(noise_seed ^ (std::hash<std::string>{}(video_id) * 1000003ULL +
                                              static_cast<std::uint64_t>(frame)));
            std::normal_distribution<float> noise(0.0f, static_cast<float>(noise_sd));
            for (float& x : v) x += noise(rng);
        }
        return v;
    };
    const temporal::Layer3Model model = temporal::learn_layer3(seqs, plans, encoder);

    std::map<std::string, std::vector<float>> sigs;
    for (const auto& li : ds.train_eval_images)
        sigs[li.item_id] = temporal::encode_layer3(flatten_gray(li.image), model);
    for (const auto& li : ds.test_images)
        sigs[li.item_id] = temporal::encode_layer3(flatten_gray(li.image), model);
    return pair_accuracy(sigs, ds.train_pairs, ds.test_pairs);
}

std::vector<temporal::ComplexCellPlan> plans_for_window(const synth::SynthDataset& ds,
                                                        double window_seconds) {
    std::vector<temporal::ComplexCellPlan> plans;
    for (const auto& v : ds.train_videos)
        plans.push_back(temporal::plan_even_nonoverlap(sequence_of(v), window_seconds));
    return plans;
}

}  // namespace

ClutterResult run_clutter_experiment(std::uint64_t seed, const TrendConfig& cfg) {
    TrendConfig short_cfg = cfg;
    short_cfg.video_seconds = 20.0;  // the one-layer protocol needs only the orbit sweep
    const synth::SynthDataset uniform =
        synth::gen_dataset(dataset_config(short_cfg, synth::ClutterMode::Uniform), seed);
    const synth::SynthDataset clutter =
        synth::gen_dataset(dataset_config(short_cfg, synth::ClutterMode::Clutter), seed);

    ClutterResult result;
    result.pixel_accuracy = pixel_accuracy(clutter);
    result.pooled_uniform_accuracy = pooled_accuracy(uniform);
    result.pooled_clutter_accuracy = pooled_accuracy(clutter);
    return result;
}

std::vector<double> run_pooling_sweep(std::uint64_t seed, const std::vector<double>& windows,
                                      const TrendConfig& cfg) {
    const synth::SynthDataset ds =
        synth::gen_dataset(dataset_config(cfg, synth::ClutterMode::Uniform), seed);
    std::vector<double> accuracies;
    accuracies.reserve(windows.size());
    for (double w : windows)
        accuracies.push_back(
            layer3_accuracy(ds, plans_for_window(ds, w), cfg.frame_noise_sd, seed ^ 0x9018ULL));
    return accuracies;
}

ScrambleResult run_scramble_control(std::uint64_t seed, const TrendConfig& cfg,
                                    double window_seconds) {
    const synth::SynthDataset ds =
        synth::gen_dataset(dataset_config(cfg, synth::ClutterMode::Uniform), seed);
    const std::vector<temporal::ComplexCellPlan> intact = plans_for_window(ds, window_seconds);
    const std::vector<temporal::ComplexCellPlan> scrambled =
        temporal::scramble_assignment(intact, seed ^ 0x5c5aULL);

    ScrambleResult result;
    const std::uint64_t noise_seed = seed ^ 0x9018ULL;
    result.intact_accuracy = layer3_accuracy(ds, intact, cfg.frame_noise_sd, noise_seed);
    result.no_pooling_accuracy =
        layer3_accuracy(ds, plans_for_window(ds, 0.0), cfg.frame_noise_sd, noise_seed);
    result.scrambled_accuracy = layer3_accuracy(ds, scrambled, cfg.frame_noise_sd, noise_seed);
    return result;
}

}  // namespace hw::experiments
