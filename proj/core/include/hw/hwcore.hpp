#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hw/image.hpp"

namespace hw::hwcore {

enum class Pooling { Max, Mean, Lp };

struct PoolingDescriptor {
    Pooling kind = Pooling::Max;
    double p = 2.0;  // Lp only, must be >= 1
};

/// Templates feeding one complex cell. All vectors share one dimension and
/// have positive norm.
struct TemplateBook {
    int module_id = 0;
    std::vector<std::vector<float>> templates;
    std::vector<std::string> provenance;  // optional, parallel to templates
};

/// Mean + orthonormal eigenvector basis for projecting templates and windows.
struct ReducedBasis {
    Eigen::VectorXf mean;
    Eigen::MatrixXf eigenvectors;  // dim x k, columns orthonormal
    int k = 0;
};

/// Second-layer templates grouped by base patch; each base has exactly
/// variants_per_base transformed versions, stored contiguously.
struct Layer2Bank {
    int base_count = 0;
    int variants_per_base = 0;
    int tpl_height = 0;
    int tpl_width = 0;
    int tpl_depth = 0;
    std::vector<FeatureMap> templates;  // base_count * variants_per_base
    std::optional<ReducedBasis> reduced;
};

double normalized_dot(std::span<const float> x, std::span<const float> t);

double pool(const std::vector<double>& values, const PoolingDescriptor& desc);

/// mu_k(x) = pool over the k-th book of cosines between x and its templates.
std::vector<float> signature(std::span<const float> x,
                             const std::vector<std::pair<TemplateBook, PoolingDescriptor>>& modules);

/// Valid-region sliding-window cosine of the template against the map.
/// Zero-norm windows respond 0. Output depth is 1.
FeatureMap ndp_convolve(const FeatureMap& level, const FeatureMap& tpl);

/// Per base patch: max cosine over all pyramid levels, spatial offsets, and
/// variants. Levels smaller than the template contribute nothing.
std::vector<float> encode_layer2(const FeaturePyramid& pyr, const Layer2Bank& bank);

/// Same contract as encode_layer2; the heavy window-template dot products
/// are reconstructed from projections onto the centered basis, which is
/// exact whenever the templates lie in the basis span.
std::vector<float> encode_layer2_reduced(const FeaturePyramid& pyr, const Layer2Bank& bank,
                                         const ReducedBasis& basis);

/// PCA of the flattened template matrix; k largest eigenvectors.
ReducedBasis fit_template_pca(const Layer2Bank& bank, int k);

/// Shared PCA on rows of a data matrix. Eigenvalues returned non-increasing.
struct PcaFit {
    Eigen::VectorXf mean;
    Eigen::MatrixXf eigenvectors;  // dim x k
    Eigen::VectorXf eigenvalues;   // k, non-increasing
};
PcaFit fit_pca(const Eigen::MatrixXf& rows, int k);

/// Rotation about the patch center by bilinear resampling; out-of-bounds
/// samples clamp to the nearest edge pixel.
Image rotate_about_center(const Image& img, double degrees);

Image horizontal_flip(const Image& img);

/// Central 104x80 crop, rotations {-18,-9,0,9,18} degrees, each unflipped
/// then flipped: 10 variants per source image, rotation-major order.
std::vector<Image> prepare_face_patches(const std::vector<Image>& images);

/// Seeded random 104x104 crop per image, rotations {-18,-9,0,9,18}: 5
/// variants per source image.
std::vector<Image> prepare_animal_patches(const std::vector<Image>& images, std::uint64_t seed);

/// Groups a flat patch list (variants contiguous per base) into a bank of
/// feature-space templates via the supplied per-patch feature function.
template <typename FeatureFn>
Layer2Bank build_layer2_bank(const std::vector<Image>& patches, int variants_per_base,
                             FeatureFn&& feature_fn) {
    if (patches.empty() || variants_per_base < 1 ||
        patches.size() % static_cast<std::size_t>(variants_per_base) != 0)
        throw std::invalid_argument("build_layer2_bank: patch count not divisible by variants");
    Layer2Bank bank;
    bank.variants_per_base = variants_per_base;
    bank.base_count = static_cast<int>(patches.size()) / variants_per_base;
    bank.templates.reserve(patches.size());
    for (const Image& p : patches) bank.templates.push_back(feature_fn(p));
    bank.tpl_height = bank.templates.front().height;
    bank.tpl_width = bank.templates.front().width;
    bank.tpl_depth = bank.templates.front().depth;
    for (const FeatureMap& t : bank.templates)
        if (t.height != bank.tpl_height || t.width != bank.tpl_width || t.depth != bank.tpl_depth)
            throw std::invalid_argument("build_layer2_bank: inconsistent template shapes");
    return bank;
}

}  // namespace hw::hwcore
