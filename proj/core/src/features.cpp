#include "hw/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hw::features {

namespace {

// Plain valid-region convolution of a grayscale image with every filter in
// the bank; output depth = filter count.
FeatureMap convolve_bank(const Image& img, const FilterBank& bank) {
    if (img.channels != bank.channels)
        throw std::invalid_argument("convolve_bank: channel mismatch");
    if (img.height < bank.height || img.width < bank.width)
        throw std::invalid_argument("convolve_bank: image smaller than kernel");

    const int oh = img.height - bank.height + 1;
    const int ow = img.width - bank.width + 1;
    const int nf = static_cast<int>(bank.filters.size());
    FeatureMap out(oh, ow, nf);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            for (int f = 0; f < nf; ++f) {
                const std::vector<float>& k = bank.filters[f];
                double s = 0.0;
                std::size_t idx = 0;
                for (int ky = 0; ky < bank.height; ++ky)
                    for (int kx = 0; kx < bank.width; ++kx)
                        for (int c = 0; c < bank.channels; ++c)
                            s += static_cast<double>(img.at(x + kx, y + ky, c)) * k[idx++];
                out.at(y, x, f) = static_cast<float>(s);
            }
    return out;
}

void normalize_filter(std::vector<float>& f, bool subtract_mean) {
    if (subtract_mean) {
        double mean = 0.0;
        for (float v : f) mean += v;
        mean /= static_cast<double>(f.size());
        for (float& v : f) v = static_cast<float>(v - mean);
    }
    double sq = 0.0;
    for (float v : f) sq += static_cast<double>(v) * v;
    const double n = std::sqrt(sq);
    if (n > 0.0)
        for (float& v : f) v = static_cast<float>(v / n);
}

}  // namespace

FilterBank make_gabor_bank(const GaborConfig& cfg) {
    if (cfg.orientations < 1 || cfg.phases < 1 || cfg.kernel_size < 1)
        throw std::invalid_argument("make_gabor_bank: bad config");
    FilterBank bank;
    bank.kind = FilterKind::Gabor;
    bank.height = bank.width = cfg.kernel_size;
    bank.channels = 1;
    bank.zero_mean = true;
    bank.unit_norm = true;

    const double half = (cfg.kernel_size - 1) / 2.0;
    constexpr double kAspect = 0.5;
    for (int o = 0; o < cfg.orientations; ++o) {
        const double theta = std::numbers::pi * o / cfg.orientations;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int p = 0; p < cfg.phases; ++p) {
            const double psi = std::numbers::pi / 2.0 * p;
            std::vector<float> k(static_cast<std::size_t>(cfg.kernel_size) * cfg.kernel_size);
            std::size_t idx = 0;
            for (int y = 0; y < cfg.kernel_size; ++y)
                for (int x = 0; x < cfg.kernel_size; ++x) {
                    const double dx = x - half, dy = y - half;
                    const double xr = ct * dx + st * dy;
                    const double yr = -st * dx + ct * dy;
                    const double env = std::exp(-(xr * xr + kAspect * kAspect * yr * yr) /
                                                (2.0 * cfg.sigma * cfg.sigma));
                    const double carrier =
                        std::cos(2.0 * std::numbers::pi * xr / cfg.wavelength + psi);
                    k[idx++] = static_cast<float>(env * carrier);
                }
            normalize_filter(k, true);
            bank.filters.push_back(std::move(k));
        }
    }
    return bank;
}

FeatureMap gabor_features(const Image& img, const FilterBank& bank) {
    if (img.channels != 1) throw std::invalid_argument("gabor_features: grayscale input required");
    return maxpool_2x2(convolve_bank(img, bank));
}

FeatureMap gabor_features(const Image& img, const GaborConfig& cfg) {
    return gabor_features(img, make_gabor_bank(cfg));
}

FeatureMap hog_features(const Image& img, const HogConfig& cfg) {
    if (img.channels != 1) throw std::invalid_argument("hog_features: grayscale input required");
    if (cfg.cell_size < 2 || cfg.bins < 1) throw std::invalid_argument("hog_features: bad config");
    if (img.height < cfg.cell_size || img.width < cfg.cell_size)
        throw std::invalid_argument("hog_features: image smaller than one cell");

    const int cells_y = img.height / cfg.cell_size;
    const int cells_x = img.width / cfg.cell_size;
    FeatureMap out(cells_y, cells_x, cfg.bins);

    for (int cy = 0; cy < cells_y; ++cy)
        for (int cx = 0; cx < cells_x; ++cx) {
            std::vector<double> hist(static_cast<std::size_t>(cfg.bins), 0.0);
            for (int py = 0; py < cfg.cell_size; ++py)
                for (int px = 0; px < cfg.cell_size; ++px) {
                    const int x = cx * cfg.cell_size + px;
                    const int y = cy * cfg.cell_size + py;
                    // Central differences with replicated borders.
                    const float gx = img.at(std::min(x + 1, img.width - 1), y, 0) -
                                     img.at(std::max(x - 1, 0), y, 0);
                    const float gy = img.at(x, std::min(y + 1, img.height - 1), 0) -
                                     img.at(x, std::max(y - 1, 0), 0);
                    const double mag = std::sqrt(static_cast<double>(gx) * gx +
                                                 static_cast<double>(gy) * gy);
                    if (mag == 0.0) continue;
                    // Unsigned orientation in [0, pi), soft-assigned to the
                    // two nearest bins (circular).
                    double angle = std::atan2(gy, gx);
                    if (angle < 0.0) angle += std::numbers::pi;
                    if (angle >= std::numbers::pi) angle -= std::numbers::pi;
                    const double pos = angle / std::numbers::pi * cfg.bins - 0.5;
                    const int b0 = static_cast<int>(std::floor(pos));
                    const double w1 = pos - b0;
                    hist[static_cast<std::size_t>((b0 + cfg.bins) % cfg.bins)] += mag * (1.0 - w1);
                    hist[static_cast<std::size_t>((b0 + 1 + cfg.bins) % cfg.bins)] += mag * w1;
                }
            double sq = 0.0;
            for (double h : hist) sq += h * h;
            const double inv = 1.0 / std::sqrt(sq + 1e-8 * 1e-8);
            for (int b = 0; b < cfg.bins; ++b)
                out.at(cy, cx, b) = static_cast<float>(hist[static_cast<std::size_t>(b)] *
                                                       (sq > 0.0 ? inv : 0.0));
        }
    return out;
}

FilterBank pca_fit_filters(const std::vector<std::vector<float>>& patches, int k, int patch_h,
                           int patch_w, int channels) {
    if (patches.empty()) throw std::invalid_argument("pca_fit_filters: no patches");
    const std::size_t dim = patches.front().size();
    if (dim != static_cast<std::size_t>(patch_h) * patch_w * channels)
        throw std::invalid_argument("pca_fit_filters: patch shape mismatch");
    for (const auto& p : patches)
        if (p.size() != dim) throw std::invalid_argument("pca_fit_filters: ragged patches");
    if (k < 1 || k > static_cast<int>(dim) || k > static_cast<int>(patches.size()))
        throw std::invalid_argument("pca_fit_filters: k out of range");

    Eigen::MatrixXf rows(static_cast<int>(patches.size()), static_cast<int>(dim));
    for (std::size_t i = 0; i < patches.size(); ++i)
        rows.row(static_cast<int>(i)) = Eigen::Map<const Eigen::VectorXf>(patches[i].data(), dim);
    hwcore::PcaFit fit = hwcore::fit_pca(rows, k);

    FilterBank bank;
    bank.kind = FilterKind::EigenPatch;
    bank.height = patch_h;
    bank.width = patch_w;
    bank.channels = channels;
    bank.zero_mean = false;
    bank.unit_norm = true;
    bank.eigenvalues = fit.eigenvalues;
    for (int i = 0; i < k; ++i) {
        std::vector<float> f(dim);
        Eigen::Map<Eigen::VectorXf>(f.data(), dim) = fit.eigenvectors.col(i);
        bank.filters.push_back(std::move(f));
    }
    return bank;
}

FeatureMap pca_features(const Image& img, const FilterBank& bank) {
    if (img.channels != 1) throw std::invalid_argument("pca_features: grayscale input required");
    FeatureMap resp = convolve_bank(img, bank);
    for (float& v : resp.data) v = std::fabs(v);
    return maxpool_2x2(resp);
}

FeatureMap maxpool_2x2(const FeatureMap& fm) {
    if (fm.height < 2 || fm.width < 2)
        throw std::invalid_argument("maxpool_2x2: map smaller than 2x2");
    FeatureMap out(fm.height / 2, fm.width / 2, fm.depth);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int z = 0; z < fm.depth; ++z)
                out.at(y, x, z) = std::max(std::max(fm.at(2 * y, 2 * x, z), fm.at(2 * y, 2 * x + 1, z)),
                                           std::max(fm.at(2 * y + 1, 2 * x, z),
                                                    fm.at(2 * y + 1, 2 * x + 1, z)));
    return out;
}

FeatureMap concat_depth(const std::vector<FeatureMap>& maps) {
    if (maps.empty()) throw std::invalid_argument("concat_depth: no maps");
    int h = maps.front().height, w = maps.front().width, z = 0;
    for (const auto& m : maps) {
        h = std::min(h, m.height);
        w = std::min(w, m.width);
        z += m.depth;
    }
    FeatureMap out(h, w, z);
    int z_off = 0;
    for (const auto& m : maps) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int d = 0; d < m.depth; ++d) out.at(y, x, z_off + d) = m.at(y, x, d);
        z_off += m.depth;
    }
    return out;
}

namespace {
Image extract_channel(const Image& img, int c) {
    Image out(img.width, img.height, 1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(x, y, 0) = img.at(x, y, c);
    return out;
}
}  // namespace

FeatureMap hmax2_stage1(const Image& img, const Hmax2Config& cfg, const FilterBank& pca_bank) {
    if (img.channels != 3) throw std::invalid_argument("hmax2_stage1: color input required");
    const FilterBank gabor_bank = make_gabor_bank(cfg.gabor);
    std::vector<FeatureMap> parts;
    for (int c = 0; c < 3; ++c) {
        const Image ch = extract_channel(img, c);
        parts.push_back(gabor_features(ch, gabor_bank));
        parts.push_back(pca_features(ch, pca_bank));
    }
    FeatureMap stacked = concat_depth(parts);
    if (stacked.depth != cfg.stage1_thickness)
        throw std::invalid_argument("hmax2_stage1: configured thickness does not match banks");
    return stacked;
}

FeatureMap hmax2_features(const Image& img, const Hmax2Config& cfg, const FilterBank& pca_bank,
                          const std::vector<FeatureMap>& templates,
                          const hwcore::ReducedBasis& basis) {
    if (templates.empty()) throw std::invalid_argument("hmax2_features: no templates");
    if (basis.k < 1) throw std::invalid_argument("hmax2_features: missing basis");
    const FeatureMap s1 = hmax2_stage1(img, cfg, pca_bank);
    for (const auto& t : templates)
        if (t.depth != s1.depth)
            throw std::invalid_argument("hmax2_features: template thickness mismatch");

    std::vector<FeatureMap> responses;
    responses.reserve(templates.size());
    for (const auto& t : templates) responses.push_back(hwcore::ndp_convolve(s1, t));
    const FeatureMap pooled = maxpool_2x2(concat_depth(responses));

    if (basis.mean.size() != pooled.depth)
        throw std::invalid_argument("hmax2_features: basis dimension mismatch");
    FeatureMap out(pooled.height, pooled.width, basis.k);
    Eigen::VectorXf v(pooled.depth);
    for (int y = 0; y < pooled.height; ++y)
        for (int x = 0; x < pooled.width; ++x) {
            for (int z = 0; z < pooled.depth; ++z) v[z] = pooled.at(y, x, z);
            const Eigen::VectorXf proj = basis.eigenvectors.transpose() * (v - basis.mean);
            for (int z = 0; z < basis.k; ++z) out.at(y, x, z) = proj[z];
        }
    return out;
}

std::vector<FeatureMap> sample_intermediate_templates(const std::vector<Image>& images,
                                                      const Hmax2Config& cfg,
                                                      const FilterBank& pca_bank, int count,
                                                      std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_intermediate_templates: count must be >= 1");
    if (images.empty()) throw std::invalid_argument("sample_intermediate_templates: no images");

    std::vector<FeatureMap> stage1;
    stage1.reserve(images.size());
    for (const Image& img : images) stage1.push_back(hmax2_stage1(img, cfg, pca_bank));

    const int side = cfg.template_size;
    std::mt19937_64 rng(seed);
    std::vector<FeatureMap> out;
    out.reserve(static_cast<std::size_t>(count));
    const int max_tries = count * 100;
    int tries = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++tries > max_tries)
            throw std::runtime_error("sample_intermediate_templates: retries exhausted");
        const auto& m = stage1[rng() % stage1.size()];
        if (m.height < side || m.width < side) continue;
        const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(m.height - side + 1));
        const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(m.width - side + 1));
        FeatureMap t(side, side, m.depth);
        double sq = 0.0;
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                for (int z = 0; z < m.depth; ++z) {
                    const float v = m.at(y0 + y, x0 + x, z);
                    t.at(y, x, z) = v;
                    sq += static_cast<double>(v) * v;
                }
        if (sq <= 0.0) continue;  // degenerate window, resample
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::vector<float>> sample_patches(const std::vector<Image>& images, int patch_size,
                                               int count, std::uint64_t seed) {
    if (images.empty() || count < 1) throw std::invalid_argument("sample_patches: bad arguments");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<float>> patches;
    patches.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(patches.size()) < count) {
        const Image& src = images[rng() % images.size()];
        const Image gray = src.channels == 1 ? src : imagecore::to_grayscale(src);
        if (gray.height < patch_size || gray.width < patch_size) continue;
        const int y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(gray.height - patch_size + 1));
        const int x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(gray.width - patch_size + 1));
        std::vector<float> p;
        p.reserve(static_cast<std::size_t>(patch_size) * patch_size);
        for (int y = 0; y < patch_size; ++y)
            for (int x = 0; x < patch_size; ++x) p.push_back(gray.at(x0 + x, y0 + y, 0));
        patches.push_back(std::move(p));
    }
    return patches;
}

FeatureMap extract(const Image& img, const LowLevelConfig& cfg, const FilterBank* pca_bank) {
    const Image gray = img.channels == 1 ? img : imagecore::to_grayscale(img);
    switch (cfg.kind) {
        case LowLevelKind::Gabor:
            return gabor_features(gray, cfg.gabor);
        case LowLevelKind::Hog:
            return hog_features(gray, cfg.hog);
        case LowLevelKind::Pca:
            if (!pca_bank) throw std::invalid_argument("extract: PCA kind needs a filter bank");
            return pca_features(gray, *pca_bank);
        case LowLevelKind::Hmax2:
            throw std::invalid_argument("extract: Hmax2 needs templates and a basis");
    }
    throw std::logic_error("extract: unknown kind");
}

}  // namespace hw::features
