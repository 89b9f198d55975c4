#pragma once

#include <cstdint>
#include <vector>

#include "hw/hwcore.hpp"
#include "hw/image.hpp"

namespace hw::features {

enum class FilterKind { Gabor, EigenPatch };

/// Convolution kernels sharing one shape. Gabor banks are zero-mean and
/// unit-norm; eigen-patch banks are unit-norm only (eigenvectors keep their
/// DC component).
struct FilterBank {
    FilterKind kind = FilterKind::Gabor;
    int height = 0;
    int width = 0;
    int channels = 1;
    bool zero_mean = false;
    bool unit_norm = false;
    std::vector<std::vector<float>> filters;  // flattened, h*w*c each
    Eigen::VectorXf eigenvalues;              // EigenPatch only, non-increasing
};

struct GaborConfig {
    int orientations = 8;
    int phases = 2;
    int kernel_size = 7;
    double wavelength = 4.0;
    double sigma = 2.5;
};

struct HogConfig {
    int cell_size = 8;
    int bins = 9;
};

struct PcaConfig {
    int patch_size = 8;
    int filter_count = 48;
    int train_patch_count = 50000;
};

struct Hmax2Config {
    GaborConfig gabor;                 // per color channel
    PcaConfig pca{8, 48, 50000};       // per channel; 3*(8*2) Gabor + 3*48 PCA = 192
    int stage1_thickness = 192;
    int template_count = 4000;
    int template_size = 5;
    int reduced_depth = 256;
};

enum class LowLevelKind { Gabor, Hog, Pca, Hmax2 };

struct LowLevelConfig {
    LowLevelKind kind = LowLevelKind::Gabor;
    GaborConfig gabor;
    HogConfig hog;
    PcaConfig pca;
    Hmax2Config hmax2;
};

FilterBank make_gabor_bank(const GaborConfig& cfg);

/// Valid convolution with each Gabor kernel, then 2x2/stride-2 max pooling.
FeatureMap gabor_features(const Image& img, const GaborConfig& cfg);
FeatureMap gabor_features(const Image& img, const FilterBank& bank);

/// Per-cell unsigned-gradient orientation histograms, soft-binned, L2
/// normalized per cell with epsilon.
FeatureMap hog_features(const Image& img, const HogConfig& cfg);

/// Top-k eigen-patches of the mean-centered patch covariance.
FilterBank pca_fit_filters(const std::vector<std::vector<float>>& patches, int k, int patch_h,
                           int patch_w, int channels = 1);

/// Valid convolution with eigen-patches, absolute value, then 2x2 pooling.
FeatureMap pca_features(const Image& img, const FilterBank& bank);

/// Per-channel max over disjoint 2x2 blocks; trailing odd row/column dropped.
FeatureMap maxpool_2x2(const FeatureMap& fm);

/// Depth-wise concatenation; maps are cropped to the common min height/width
/// (aligned at the top-left) before stacking.
FeatureMap concat_depth(const std::vector<FeatureMap>& maps);

/// Stage-1 of the two-stage color feature: Gabor + eigen-patch responses per
/// color channel, concatenated to the configured thickness.
FeatureMap hmax2_stage1(const Image& img, const Hmax2Config& cfg, const FilterBank& pca_bank);

/// Full two-stage color feature: stage-1, then normalized-dot-product
/// convolution with the intermediate templates, 2x2 pooling, and projection
/// of the template dimension onto the reduced basis.
FeatureMap hmax2_features(const Image& img, const Hmax2Config& cfg, const FilterBank& pca_bank,
                          const std::vector<FeatureMap>& templates,
                          const hwcore::ReducedBasis& basis);

/// Seeded random 5x5xthickness windows of stage-1 maps of the given images;
/// zero-norm windows are rejected and resampled.
std::vector<FeatureMap> sample_intermediate_templates(const std::vector<Image>& images,
                                                      const Hmax2Config& cfg,
                                                      const FilterBank& pca_bank, int count,
                                                      std::uint64_t seed);

/// Seeded random square patches from grayscale images, flattened; training
/// input for pca_fit_filters.
std::vector<std::vector<float>> sample_patches(const std::vector<Image>& images, int patch_size,
                                               int count, std::uint64_t seed);

/// Dispatches on cfg.kind for the single-image feature kinds (not Hmax2).
FeatureMap extract(const Image& img, const LowLevelConfig& cfg, const FilterBank* pca_bank);

}  // namespace hw::features
