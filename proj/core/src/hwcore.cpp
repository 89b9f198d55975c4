#include "hw/hwcore.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hw::hwcore {

namespace {
constexpr double kNormEps = 1e-12;

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }
}  // namespace

double normalized_dot(std::span<const float> x, std::span<const float> t) {
    if (x.size() != t.size()) throw std::invalid_argument("normalized_dot: dimension mismatch");
    const double nx = norm(x);
    const double nt = norm(t);
    if (nx < kNormEps || nt < kNormEps) return 0.0;
    return std::clamp(dot(x, t) / (nx * nt), -1.0, 1.0);
}

double pool(const std::vector<double>& values, const PoolingDescriptor& desc) {
    if (values.empty()) throw std::invalid_argument("pool: empty value list");
    switch (desc.kind) {
        case Pooling::Max:
            return *std::max_element(values.begin(), values.end());
        case Pooling::Mean: {
            double s = 0.0;
            for (double v : values) s += v;
            return s / static_cast<double>(values.size());
        }
        case Pooling::Lp: {
            if (!(desc.p >= 1.0) || !std::isfinite(desc.p))
                throw std::invalid_argument("pool: Lp requires finite p >= 1");
            double s = 0.0;
            for (double v : values) {
                if (v < 0.0) throw std::invalid_argument("pool: Lp requires non-negative values");
                s += std::pow(v, desc.p);
            }
            return std::pow(s, 1.0 / desc.p);
        }
    }
    throw std::logic_error("pool: unknown kind");
}

std::vector<float> signature(
    std::span<const float> x,
    const std::vector<std::pair<TemplateBook, PoolingDescriptor>>& modules) {
    std::vector<float> sig;
    sig.reserve(modules.size());
    for (const auto& [book, desc] : modules) {
        if (book.templates.empty()) throw std::invalid_argument("signature: empty template book");
        std::vector<double> responses;
        responses.reserve(book.templates.size());
        for (const auto& t : book.templates) responses.push_back(normalized_dot(x, t));
        sig.push_back(static_cast<float>(pool(responses, desc)));
    }
    return sig;
}

namespace {

// Sum of squares over every (th x tw x depth) window of the level, via a 2-D
// integral image of per-pixel squared channel sums.
std::vector<double> window_sq_norms(const FeatureMap& level, int th, int tw) {
    const int H = level.height, W = level.width, Z = level.depth;
    std::vector<double> integral(static_cast<std::size_t>(H + 1) * (W + 1), 0.0);
    auto I = [&](int y, int x) -> double& {
        return integral[static_cast<std::size_t>(y) * (W + 1) + x];
    };
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double sq = 0.0;
            for (int z = 0; z < Z; ++z) {
                const double v = level.at(y, x, z);
                sq += v * v;
            }
            I(y + 1, x + 1) = sq + I(y, x + 1) + I(y + 1, x) - I(y, x);
        }
    const int oh = H - th + 1, ow = W - tw + 1;
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            out[static_cast<std::size_t>(y) * ow + x] =
                I(y + th, x + tw) - I(y, x + tw) - I(y + th, x) + I(y, x);
    return out;
}

double window_template_dot(const FeatureMap& level, const FeatureMap& tpl, int oy, int ox) {
    double s = 0.0;
    const int row_len = tpl.width * tpl.depth;
    for (int ty = 0; ty < tpl.height; ++ty) {
        const float* lrow = &level.data[(static_cast<std::size_t>(oy + ty) * level.width + ox) *
                                        level.depth];
        const float* trow = &tpl.data[static_cast<std::size_t>(ty) * row_len];
        for (int i = 0; i < row_len; ++i) s += static_cast<double>(lrow[i]) * trow[i];
    }
    return s;
}

}  // namespace

FeatureMap ndp_convolve(const FeatureMap& level, const FeatureMap& tpl) {
    if (level.depth != tpl.depth) throw std::invalid_argument("ndp_convolve: depth mismatch");
    if (level.height < tpl.height || level.width < tpl.width)
        throw std::invalid_argument("ndp_convolve: level smaller than template");

    const int oh = level.height - tpl.height + 1;
    const int ow = level.width - tpl.width + 1;
    const double tnorm = norm(tpl.data);
    const std::vector<double> wsq = window_sq_norms(level, tpl.height, tpl.width);

    FeatureMap out(oh, ow, 1);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            const double wnorm = std::sqrt(std::max(0.0, wsq[static_cast<std::size_t>(y) * ow + x]));
            if (wnorm < kNormEps || tnorm < kNormEps) {
                out.at(y, x, 0) = 0.0f;
                continue;
            }
            const double c = window_template_dot(level, tpl, y, x) / (wnorm * tnorm);
            out.at(y, x, 0) = static_cast<float>(std::clamp(c, -1.0, 1.0));
        }
    return out;
}

std::vector<float> encode_layer2(const FeaturePyramid& pyr, const Layer2Bank& bank) {
    if (bank.templates.empty()) throw std::invalid_argument("encode_layer2: empty bank");
    const int th = bank.tpl_height, tw = bank.tpl_width;

    bool any_level_fits = false;
    for (const auto& lvl : pyr.levels) {
        if (lvl.map.depth != bank.tpl_depth)
            throw std::invalid_argument("encode_layer2: depth mismatch");
        if (lvl.map.height >= th && lvl.map.width >= tw) any_level_fits = true;
    }
    if (!any_level_fits)
        throw std::invalid_argument("encode_layer2: no pyramid level fits the template");

    std::vector<double> tnorms(bank.templates.size());
    for (std::size_t i = 0; i < bank.templates.size(); ++i)
        tnorms[i] = norm(bank.templates[i].data);

    std::vector<double> best(static_cast<std::size_t>(bank.base_count), -1.0);
    for (const auto& lvl : pyr.levels) {
        if (lvl.map.height < th || lvl.map.width < tw) continue;
        const int oh = lvl.map.height - th + 1;
        const int ow = lvl.map.width - tw + 1;
        const std::vector<double> wsq = window_sq_norms(lvl.map, th, tw);
        for (int b = 0; b < bank.base_count; ++b) {
            for (int v = 0; v < bank.variants_per_base; ++v) {
                const std::size_t ti = static_cast<std::size_t>(b) * bank.variants_per_base + v;
                const FeatureMap& tpl = bank.templates[ti];
                if (tnorms[ti] < kNormEps) continue;
                for (int y = 0; y < oh; ++y)
                    for (int x = 0; x < ow; ++x) {
                        const double wnorm =
                            std::sqrt(std::max(0.0, wsq[static_cast<std::size_t>(y) * ow + x]));
                        if (wnorm < kNormEps) {
                            best[b] = std::max(best[b], 0.0);
                            continue;
                        }
                        const double c =
                            window_template_dot(lvl.map, tpl, y, x) / (wnorm * tnorms[ti]);
                        best[b] = std::max(best[b], std::clamp(c, -1.0, 1.0));
                    }
            }
        }
    }
    std::vector<float> out(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) out[i] = static_cast<float>(best[i]);
    return out;
}

PcaFit fit_pca(const Eigen::MatrixXf& rows, int k) {
    const int n = static_cast<int>(rows.rows());
    const int dim = static_cast<int>(rows.cols());
    if (k < 1 || k > dim || k > n) throw std::invalid_argument("fit_pca: k out of range");

    Eigen::VectorXd mean = rows.cast<double>().colwise().mean();
    Eigen::MatrixXd centered = rows.cast<double>().rowwise() - mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / std::max(1, n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigensolver failed");

    PcaFit fit;
    fit.mean = mean.cast<float>();
    fit.eigenvectors.resize(dim, k);
    fit.eigenvalues.resize(k);
    // Eigen returns ascending order; take the top-k reversed.
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd v = solver.eigenvectors().col(dim - 1 - i);
        // Deterministic sign: largest-magnitude entry positive.
        int argmax = 0;
        v.cwiseAbs().maxCoeff(&argmax);
        if (v[argmax] < 0) v = -v;
        fit.eigenvectors.col(i) = v.cast<float>();
        fit.eigenvalues[i] = static_cast<float>(std::max(0.0, solver.eigenvalues()[dim - 1 - i]));
    }
    return fit;
}

ReducedBasis fit_template_pca(const Layer2Bank& bank, int k) {
    const std::size_t dim = bank.templates.front().size();
    Eigen::MatrixXf rows(static_cast<int>(bank.templates.size()), static_cast<int>(dim));
    for (std::size_t i = 0; i < bank.templates.size(); ++i)
        rows.row(static_cast<int>(i)) =
            Eigen::Map<const Eigen::VectorXf>(bank.templates[i].data.data(), dim);
    PcaFit fit = fit_pca(rows, k);
    return ReducedBasis{std::move(fit.mean), std::move(fit.eigenvectors), k};
}

std::vector<float> encode_layer2_reduced(const FeaturePyramid& pyr, const Layer2Bank& bank,
                                         const ReducedBasis& basis) {
    if (bank.templates.empty()) throw std::invalid_argument("encode_layer2_reduced: empty bank");
    const int th = bank.tpl_height, tw = bank.tpl_width, tz = bank.tpl_depth;
    const std::size_t dim = static_cast<std::size_t>(th) * tw * tz;
    if (static_cast<std::size_t>(basis.mean.size()) != dim)
        throw std::invalid_argument("encode_layer2_reduced: basis/bank dimension mismatch");

    bool any_level_fits = false;
    for (const auto& lvl : pyr.levels) {
        if (lvl.map.depth != tz)
            throw std::invalid_argument("encode_layer2_reduced: depth mismatch");
        if (lvl.map.height >= th && lvl.map.width >= tw) any_level_fits = true;
    }
    if (!any_level_fits)
        throw std::invalid_argument("encode_layer2_reduced: no pyramid level fits the template");

    // Preproject the centered templates once. The window-template dot is
    // reconstructed as p_w . p_t plus the mean cross-terms, which is exact
    // whenever the centered template lies in the basis span; norms stay in
    // the full space so the full-rank case reproduces the exact encoder.
    const int n_tpl = static_cast<int>(bank.templates.size());
    Eigen::MatrixXd proj_templates(basis.k, n_tpl);
    Eigen::VectorXd tpl_norms(n_tpl), tpl_mean_dot(n_tpl);
    const Eigen::VectorXd mean = basis.mean.cast<double>();
    const Eigen::MatrixXd eig = basis.eigenvectors.cast<double>();
    const double mean_sq = mean.squaredNorm();
    for (int i = 0; i < n_tpl; ++i) {
        Eigen::Map<const Eigen::VectorXf> t(bank.templates[static_cast<std::size_t>(i)].data.data(),
                                            dim);
        const Eigen::VectorXd tc = t.cast<double>() - mean;
        proj_templates.col(i) = eig.transpose() * tc;
        tpl_norms[i] = t.cast<double>().norm();
        tpl_mean_dot[i] = mean.dot(tc);
    }

    std::vector<double> best(static_cast<std::size_t>(bank.base_count), -1.0);
    Eigen::VectorXd window(static_cast<int>(dim));
    for (const auto& lvl : pyr.levels) {
        if (lvl.map.height < th || lvl.map.width < tw) continue;
        const int oh = lvl.map.height - th + 1;
        const int ow = lvl.map.width - tw + 1;
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                int idx = 0;
                for (int ty = 0; ty < th; ++ty) {
                    const float* row =
                        &lvl.map.data[(static_cast<std::size_t>(y + ty) * lvl.map.width + x) * tz];
                    for (int i = 0; i < tw * tz; ++i) window[idx++] = row[i];
                }
                const double wnorm = window.norm();
                if (wnorm < kNormEps) {
                    for (auto& b : best) b = std::max(b, 0.0);
                    continue;
                }
                const Eigen::VectorXd wc = window - mean;
                const Eigen::VectorXd pw = eig.transpose() * wc;
                const double window_mean_dot = mean.dot(wc);
                const Eigen::VectorXd dots = proj_templates.transpose() * pw;
                for (int b = 0; b < bank.base_count; ++b)
                    for (int v = 0; v < bank.variants_per_base; ++v) {
                        const int ti = b * bank.variants_per_base + v;
                        if (tpl_norms[ti] < kNormEps) continue;
                        const double dot_full =
                            dots[ti] + window_mean_dot + tpl_mean_dot[ti] + mean_sq;
                        const double c =
                            std::clamp(dot_full / (wnorm * tpl_norms[ti]), -1.0, 1.0);
                        best[b] = std::max(best[b], c);
                    }
            }
    }
    std::vector<float> out(best.size());
    for (std::size_t i = 0; i < best.size(); ++i) out[i] = static_cast<float>(best[i]);
    return out;
}

Image rotate_about_center(const Image& img, double degrees) {
    if (degrees == 0.0) return img;
    const double rad = degrees * M_PI / 180.0;
    const double ca = std::cos(rad), sa = std::sin(rad);
    const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;

    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            // Inverse mapping; samples outside clamp to the edge.
            const double dx = x - cx, dy = y - cy;
            double sx_f = ca * dx + sa * dy + cx;
            double sy_f = -sa * dx + ca * dy + cy;
            sx_f = std::clamp(sx_f, 0.0, static_cast<double>(img.width - 1));
            sy_f = std::clamp(sy_f, 0.0, static_cast<double>(img.height - 1));
            const int x0 = static_cast<int>(sx_f), y0 = static_cast<int>(sy_f);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const float wx = static_cast<float>(sx_f - x0);
            const float wy = static_cast<float>(sy_f - y0);
            for (int c = 0; c < img.channels; ++c) {
                const float top = (1 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                const float bot = (1 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                out.at(x, y, c) = (1 - wy) * top + wy * bot;
            }
        }
    return out;
}

Image horizontal_flip(const Image& img) {
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
    return out;
}

namespace {

Image crop(const Image& img, int x0, int y0, int w, int h) {
    Image out(w, h, img.channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    return out;
}

constexpr double kPatchRotations[] = {-18.0, -9.0, 0.0, 9.0, 18.0};

}  // namespace

std::vector<Image> prepare_face_patches(const std::vector<Image>& images) {
    constexpr int kW = 80, kH = 104;
    std::vector<Image> patches;
    patches.reserve(images.size() * 10);
    for (const Image& img : images) {
        if (img.width < kW || img.height < kH)
            throw std::invalid_argument("prepare_face_patches: source smaller than 104x80");
        const Image center = crop(img, (img.width - kW) / 2, (img.height - kH) / 2, kW, kH);
        for (double deg : kPatchRotations) {
            Image r = rotate_about_center(center, deg);
            patches.push_back(r);
            patches.push_back(horizontal_flip(r));
        }
    }
    return patches;
}

std::vector<Image> prepare_animal_patches(const std::vector<Image>& images, std::uint64_t seed) {
    constexpr int kSide = 104;
    std::mt19937_64 rng(seed);
    std::vector<Image> patches;
    patches.reserve(images.size() * 5);
    for (const Image& img : images) {
        if (img.width < kSide || img.height < kSide)
            throw std::invalid_argument("prepare_animal_patches: source smaller than 104x104");
        std::uniform_int_distribution<int> dx(0, img.width - kSide), dy(0, img.height - kSide);
        const int x0 = dx(rng), y0 = dy(rng);
        const Image patch = crop(img, x0, y0, kSide, kSide);
        for (double deg : kPatchRotations) patches.push_back(rotate_about_center(patch, deg));
    }
    return patches;
}

}  // namespace hw::hwcore
