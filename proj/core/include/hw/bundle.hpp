#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hw/eval.hpp"
#include "hw/features.hpp"
#include "hw/hwcore.hpp"
#include "hw/temporal.hpp"

namespace hw::bundle {

/// Bad or missing input data (exit code 3 at the CLI).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bundle does not match the inputs or the expected version (exit code 4).
struct ModelMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kBundleVersion = "hwsig-bundle-1";

/// "HWT1": u32 LE rank, u32 LE dims, then raw f32 LE values.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

/// Atomic file write: temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Everything needed to take an image to its layer-2 encoding.
struct Layer2Pipeline {
    features::LowLevelConfig lowlevel;
    features::FilterBank pca_bank;  // PCA low-level kind only
    hwcore::Layer2Bank bank;
    std::vector<double> pyramid_ratios;
    int resize_height = 400;
};

void save_layer2(const std::filesystem::path& dir, const Layer2Pipeline& pipeline);
Layer2Pipeline load_layer2(const std::filesystem::path& dir);

struct Layer3Pipeline {
    temporal::Layer3Model model;
};

void save_layer3(const std::filesystem::path& dir, const Layer3Pipeline& pipeline);
Layer3Pipeline load_layer3(const std::filesystem::path& dir);

/// Default face-model ratio list: 0.26, 0.28, then 0.04 steps to 1.0.
std::vector<double> face_pyramid_ratios();

struct VideoManifestEntry {
    std::string video_id;
    double fps = 1.0;
    std::vector<std::string> frame_paths;
};

struct VideoManifest {
    std::vector<VideoManifestEntry> entries;
};

/// JSON: {"entries": [{"videoId", "fps", "frames": [...]}]}. Paths are
/// resolved relative to the manifest location and must exist.
VideoManifest load_video_manifest(const std::filesystem::path& path);

/// CSV `itemA,itemB,label` with labels `same|diff`.
std::vector<eval::Pair> load_pairs_csv(const std::filesystem::path& path);

void save_roc_csv(const std::filesystem::path& path, const eval::RocCurve& curve);

}  // namespace hw::bundle
