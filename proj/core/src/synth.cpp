#include "hw/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace hw::synth {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

Image smoothed_noise(int w, int h, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    Image img(w, h, 1);
    for (float& v : img.data) v = uni(rng);

    // Separable Gaussian blur with replicated borders.
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-i * i / (2.0 * sigma * sigma));
        ksum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (double& k : kernel) k /= ksum;

    Image tmp(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[static_cast<std::size_t>(i + radius)] *
                     img.at(std::clamp(x + i, 0, w - 1), y, 0);
            tmp.at(x, y, 0) = static_cast<float>(s);
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i)
                s += kernel[static_cast<std::size_t>(i + radius)] *
                     tmp.at(x, std::clamp(y + i, 0, h - 1), 0);
            img.at(x, y, 0) = static_cast<float>(s);
        }
    return img;
}

double pattern_cosine(const Image& a, const Image& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        dot += static_cast<double>(a.data[i]) * b.data[i];
        na += static_cast<double>(a.data[i]) * a.data[i];
        nb += static_cast<double>(b.data[i]) * b.data[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

IdentitySpec make_identity(int id, int size, std::uint64_t seed) {
    Image noise = smoothed_noise(size, size, size / 10.0, seed);

    // Threshold at the 70th percentile: a sparse soft blob.
    std::vector<float> sorted = noise.data;
    std::sort(sorted.begin(), sorted.end());
    const float q = sorted[static_cast<std::size_t>(0.7 * (sorted.size() - 1))];
    const float hi = sorted.back();
    const float range = std::max(hi - q, 1e-6f);

    IdentitySpec spec;
    spec.id = id;
    spec.pattern = Image(size, size, 1);
    spec.alpha = Image(size, size, 1);
    const double c = (size - 1) / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const float v = std::clamp((noise.at(x, y, 0) - q) / range, 0.0f, 1.0f);
            // Radial falloff keeps rotations inside the patch.
            const double r = std::sqrt((x - c) * (x - c) + (y - c) * (y - c)) / (0.5 * size);
            const float disc = static_cast<float>(std::clamp(1.2 - 1.6 * (r - 0.4), 0.0, 1.0));
            spec.pattern.at(x, y, 0) = v * disc;
            spec.alpha.at(x, y, 0) = std::min(1.0f, 1.5f * v * disc);
        }
    return spec;
}

// Rotation with zero fill so a rotated pattern never smears past its mask.
Image rotate_zero_fill(const Image& img, double degrees) {
    if (degrees == 0.0) return img;
    const double rad = degrees * M_PI / 180.0;
    const double ca = std::cos(rad), sa = std::sin(rad);
    const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
    Image out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double sx_f = ca * dx + sa * dy + cx;
            const double sy_f = -sa * dx + ca * dy + cy;
            if (sx_f < 0 || sy_f < 0 || sx_f > img.width - 1 || sy_f > img.height - 1) continue;
            const int x0 = static_cast<int>(sx_f), y0 = static_cast<int>(sy_f);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const float wx = static_cast<float>(sx_f - x0);
            const float wy = static_cast<float>(sy_f - y0);
            for (int ch = 0; ch < img.channels; ++ch) {
                const float top = (1 - wx) * img.at(x0, y0, ch) + wx * img.at(x1, y0, ch);
                const float bot = (1 - wx) * img.at(x0, y1, ch) + wx * img.at(x1, y1, ch);
                out.at(x, y, ch) = (1 - wy) * top + wy * bot;
            }
        }
    return out;
}

struct SweepParams {
    double tx = 0.0, ty = 0.0, rot = 0.0, scale = 1.0;
};

SweepParams params_at(const TransformSpec& t, double s) {
    SweepParams p;
    const double u = 2.0 * s - 1.0;  // [-1, 1]
    switch (t.kind) {
        case TransformKind::Translate:
            p.tx = u * t.max_translate;
            p.ty = -u * t.max_translate;
            break;
        case TransformKind::Rotate:
            p.rot = u * t.max_rotate_deg;
            break;
        case TransformKind::Scale:
            p.scale = t.min_scale + s * (t.max_scale - t.min_scale);
            break;
        case TransformKind::Mixed:
            p.tx = u * t.max_translate;
            p.ty = -u * t.max_translate;
            p.rot = u * t.max_rotate_deg;
            p.scale = t.min_scale + s * (t.max_scale - t.min_scale);
            break;
    }
    return p;
}

}  // namespace

std::vector<IdentitySpec> gen_identities(int count, int size, std::uint64_t seed) {
    if (count < 1 || size < 4) throw std::invalid_argument("gen_identities: bad arguments");
    std::vector<IdentitySpec> ids;
    ids.reserve(static_cast<std::size_t>(count));
    for (int id = 0; id < count; ++id) {
        IdentitySpec spec;
        bool accepted = false;
        for (int attempt = 0; attempt < 64; ++attempt) {
            spec = make_identity(id, size, mix_seed(seed, static_cast<std::uint64_t>(id) * 64 + attempt));
            bool distinct = true;
            for (const auto& other : ids)
                if (pattern_cosine(spec.pattern, other.pattern) >= 0.99) distinct = false;
            double sq = 0.0, sum = 0.0;
            for (float v : spec.pattern.data) {
                sq += static_cast<double>(v) * v;
                sum += v;
            }
            if (distinct && sq > 0.0 && sum / spec.pattern.data.size() < 0.99) {
                accepted = true;
                break;
            }
        }
        if (!accepted) throw std::runtime_error("gen_identities: collision retries exhausted");
        ids.push_back(std::move(spec));
    }
    return ids;
}

Image render_frame(const IdentitySpec& identity, const TransformSpec& transform,
                   const ClutterSpec& clutter, int canvas, double s, std::uint64_t bg_seed) {
    const SweepParams p = params_at(transform, s);

    Image pattern = identity.pattern;
    Image alpha = identity.alpha;
    if (p.scale != 1.0) {
        const int sz = std::max(2, static_cast<int>(std::lround(pattern.width * p.scale)));
        pattern = imagecore::resize(pattern, sz, sz);
        alpha = imagecore::resize(alpha, sz, sz);
    }
    if (p.rot != 0.0) {
        pattern = rotate_zero_fill(pattern, p.rot);
        alpha = rotate_zero_fill(alpha, p.rot);
    }

    Image out(canvas, canvas, 1, clutter.mode == ClutterMode::Uniform ? clutter.uniform_value : 0.0f);
    if (clutter.mode == ClutterMode::Clutter)
        out = smoothed_noise(canvas, canvas, canvas / 16.0, bg_seed);

    const int ox = static_cast<int>(std::lround((canvas - pattern.width) / 2.0 + p.tx));
    const int oy = static_cast<int>(std::lround((canvas - pattern.height) / 2.0 + p.ty));
    if (ox < 0 || oy < 0 || ox + pattern.width > canvas || oy + pattern.height > canvas)
        throw std::invalid_argument("render_frame: pattern escapes canvas");

    for (int y = 0; y < pattern.height; ++y)
        for (int x = 0; x < pattern.width; ++x) {
            const float a = alpha.at(x, y, 0);
            float& dst = out.at(ox + x, oy + y, 0);
            dst = (1.0f - a) * dst + a * pattern.at(x, y, 0);
        }
    return out;
}

SynthVideo render_video(const IdentitySpec& identity, const TransformSpec& transform,
                        const ClutterSpec& clutter, int canvas, double fps, double seconds,
                        std::uint64_t seed) {
    const int frames = std::max(1, static_cast<int>(std::lround(seconds * fps)));
    SynthVideo video;
    video.video_id = "id" + std::to_string(identity.id) + "_v";
    video.identity = identity.id;
    video.fps = fps;
    const std::uint64_t bg_seed = mix_seed(seed, 0xb0baULL);  // fixed per video
    const int cycles = std::max(1, transform.sweep_cycles);
    for (int i = 0; i < frames; ++i) {
        const double u = frames > 1 ? static_cast<double>(i) / (frames - 1) * cycles : 0.5;
        const double m = std::fmod(u, 2.0);
        const double s = m <= 1.0 ? m : 2.0 - m;  // triangle fold
        video.frames.push_back(render_frame(identity, transform, clutter, canvas, s, bg_seed));
    }
    return video;
}

SynthDataset gen_dataset(const DatasetConfig& cfg, std::uint64_t seed) {
    if (cfg.n_test_ids < 2) throw std::invalid_argument("gen_dataset: need >= 2 test identities");
    const std::vector<IdentitySpec> ids =
        gen_identities(cfg.n_train_ids + cfg.n_test_ids, cfg.pattern_size, seed);

    SynthDataset ds;
    for (int i = 0; i < cfg.n_train_ids; ++i)
        ds.train_videos.push_back(render_video(ids[static_cast<std::size_t>(i)], cfg.transform,
                                               cfg.clutter, cfg.canvas, cfg.fps, cfg.video_seconds,
                                               mix_seed(seed, 1000 + static_cast<std::uint64_t>(i))));

    // Evaluation images always use a fresh background per image.
    ClutterSpec eval_clutter = cfg.clutter;
    std::mt19937_64 rng(mix_seed(seed, 0xe7a1ULL));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    auto make_pairs = [&](int first_id, int id_count, int n_pairs, const std::string& prefix,
                          std::vector<LabeledImage>& images, std::vector<eval::Pair>& pairs) {
        if (id_count < 2) throw std::invalid_argument("gen_dataset: not enough identities for pairs");
        auto add_image = [&](int identity) {
            LabeledImage li;
            li.item_id = prefix + std::to_string(images.size());
            li.identity = identity;
            li.image = render_frame(ids[static_cast<std::size_t>(identity)], cfg.transform,
                                    eval_clutter, cfg.canvas, uni(rng), rng());
            images.push_back(std::move(li));
            return images.back().item_id;
        };
        for (int i = 0; i < n_pairs; ++i) {
            eval::Pair pair;
            if (i % 2 == 0) {  // SAME
                const int id = first_id + static_cast<int>(rng() % static_cast<std::uint64_t>(id_count));
                pair.item_a = add_image(id);
                pair.item_b = add_image(id);
                pair.label = eval::PairLabel::Same;
            } else {  // DIFFERENT
                const int a = first_id + static_cast<int>(rng() % static_cast<std::uint64_t>(id_count));
                int b = a;
                while (b == a)
                    b = first_id + static_cast<int>(rng() % static_cast<std::uint64_t>(id_count));
                pair.item_a = add_image(a);
                pair.item_b = add_image(b);
                pair.label = eval::PairLabel::Different;
            }
            pairs.push_back(std::move(pair));
        }
    };

    make_pairs(0, cfg.n_train_ids, cfg.n_train_pairs, "tr", ds.train_eval_images, ds.train_pairs);
    make_pairs(cfg.n_train_ids, cfg.n_test_ids, cfg.n_test_pairs, "te", ds.test_images,
               ds.test_pairs);

    nlohmann::json manifest;
    manifest["seed"] = seed;
    manifest["n_train_ids"] = cfg.n_train_ids;
    manifest["n_test_ids"] = cfg.n_test_ids;
    manifest["pattern_size"] = cfg.pattern_size;
    manifest["canvas"] = cfg.canvas;
    manifest["fps"] = cfg.fps;
    manifest["video_seconds"] = cfg.video_seconds;
    manifest["n_train_pairs"] = cfg.n_train_pairs;
    manifest["n_test_pairs"] = cfg.n_test_pairs;
    manifest["transform"] = {{"kind", static_cast<int>(cfg.transform.kind)},
                             {"max_translate", cfg.transform.max_translate},
                             {"max_rotate_deg", cfg.transform.max_rotate_deg},
                             {"min_scale", cfg.transform.min_scale},
                             {"max_scale", cfg.transform.max_scale}};
    manifest["clutter"] = {{"mode", static_cast<int>(cfg.clutter.mode)},
                           {"uniform_value", cfg.clutter.uniform_value}};
    ds.manifest_json = manifest.dump(2);
    return ds;
}

const LabeledImage& find_item(const SynthDataset& ds, const std::string& item_id) {
    for (const auto& li : ds.train_eval_images)
        if (li.item_id == item_id) return li;
    for (const auto& li : ds.test_images)
        if (li.item_id == item_id) return li;
    throw std::invalid_argument("find_item: unknown item " + item_id);
}

}  // namespace hw::synth
