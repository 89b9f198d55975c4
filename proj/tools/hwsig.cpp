// hwsig: pipeline driver for the signature architecture.
//
// Exit codes: 0 ok, 2 usage, 3 bad data, 4 model mismatch.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "hw/bundle.hpp"
#include "hw/experiments.hpp"
#include "hw/features.hpp"
#include "hw/image_io.hpp"
#include "hw/svm.hpp"
#include "hw/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using hw::bundle::DataError;

namespace {

// ---------------------------------------------------------------- helpers

hw::features::LowLevelKind parse_lowlevel(const std::string& name) {
    if (name == "gabor") return hw::features::LowLevelKind::Gabor;
    if (name == "hog") return hw::features::LowLevelKind::Hog;
    if (name == "pca") return hw::features::LowLevelKind::Pca;
    throw CLI::ValidationError("--lowlevel", "expected gabor|hog|pca");
}

hw::hwcore::PoolingDescriptor parse_pooling(const std::string& name, double p) {
    if (name == "max") return {hw::hwcore::Pooling::Max};
    if (name == "mean") return {hw::hwcore::Pooling::Mean};
    if (name == "lp") return {hw::hwcore::Pooling::Lp, p};
    throw CLI::ValidationError("--pooling", "expected max|mean|lp");
}

// items CSV: `item,path` (paths relative to the CSV).
std::vector<std::pair<std::string, fs::path>> load_items_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::pair<std::string, fs::path>> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path.string() + ": malformed item line: " + line);
        fs::path p = line.substr(comma + 1);
        if (p.is_relative()) p = path.parent_path() / p;
        if (!fs::exists(p)) throw DataError(p.string() + ": missing image file");
        items.emplace_back(line.substr(0, comma), p);
    }
    if (items.empty()) throw DataError(path.string() + ": no items");
    return items;
}

// signature CSV: `item,v0,v1,...` with full float precision.
void save_signature_csv(const fs::path& path,
                        const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
    std::ostringstream out;
    out.precision(9);
    for (const auto& [item, sig] : rows) {
        out << item;
        for (float v : sig) out << ',' << v;
        out << '\n';
    }
    hw::bundle::atomic_write(path, out.str());
}

std::map<std::string, std::vector<float>> load_signature_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::map<std::string, std::vector<float>> sigs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string item, field;
        if (!std::getline(ss, item, ',')) throw DataError(path.string() + ": malformed row");
        std::vector<float> sig;
        while (std::getline(ss, field, ',')) {
            try {
                sig.push_back(std::stof(field));
            } catch (const std::exception&) {
                throw DataError(path.string() + ": bad number: " + field);
            }
        }
        if (sig.empty()) throw DataError(path.string() + ": empty signature for " + item);
        sigs[item] = std::move(sig);
    }
    if (sigs.empty()) throw DataError(path.string() + ": no signatures");
    return sigs;
}

const std::vector<float>& sig_of(const std::map<std::string, std::vector<float>>& sigs,
                                 const std::string& item) {
    const auto it = sigs.find(item);
    if (it == sigs.end()) throw DataError("no signature for item " + item);
    return it->second;
}

std::vector<hw::eval::ScoredPair> score_pairs(const std::map<std::string, std::vector<float>>& sigs,
                                              const std::vector<hw::eval::Pair>& pairs) {
    std::vector<hw::eval::ScoredPair> scored;
    scored.reserve(pairs.size());
    for (const auto& p : pairs)
        scored.push_back({hw::eval::pair_score(sig_of(sigs, p.item_a), sig_of(sigs, p.item_b)),
                          p.label});
    return scored;
}

// Image -> pyramid of low-level feature maps -> layer-2 encoding.
std::vector<float> encode_image_l2(const hw::bundle::Layer2Pipeline& pipe, const hw::Image& img) {
    const hw::Image resized = hw::imagecore::resize_to_height(img, pipe.resize_height);
    const hw::Pyramid pyr = hw::imagecore::build_pyramid(resized, pipe.pyramid_ratios);
    hw::FeaturePyramid fp;
    const hw::features::FilterBank* pca =
        pipe.pca_bank.filters.empty() ? nullptr : &pipe.pca_bank;
    for (const auto& lvl : pyr.levels)
        fp.levels.push_back({lvl.ratio, hw::features::extract(lvl.image, pipe.lowlevel, pca)});
    if (pipe.bank.reduced)
        return hw::hwcore::encode_layer2_reduced(fp, pipe.bank, *pipe.bank.reduced);
    return hw::hwcore::encode_layer2(fp, pipe.bank);
}

struct Encoder {
    hw::bundle::Layer2Pipeline l2;
    std::optional<hw::bundle::Layer3Pipeline> l3;

    std::vector<float> operator()(const fs::path& image_path) const {
        const hw::Image img = hw::imagecore::load_image(image_path.string());
        std::vector<float> v = encode_image_l2(l2, img);
        if (l3) v = hw::temporal::encode_layer3(v, l3->model);
        return v;
    }
};

Encoder load_encoder(const std::string& l2_dir, const std::string& l3_dir) {
    Encoder enc{hw::bundle::load_layer2(l2_dir), std::nullopt};
    if (!l3_dir.empty()) enc.l3 = hw::bundle::load_layer3(l3_dir);
    return enc;
}

void save_pgm_u8(const fs::path& path, const hw::Image& img) {
    hw::imagecore::save_pgm(img.channels == 1 ? img : hw::imagecore::to_grayscale(img),
                          path.string());
}

// ---------------------------------------------------------------- commands

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 0;
    int train_ids = 20, test_ids = 10, pattern_size = 24, canvas = 48;
    double fps = 1.0, seconds = 60.0;
    int train_pairs = 100, test_pairs = 100;
    std::string transform = "mixed";
    double max_translate = 6.0, max_rotate = 25.0, min_scale = 1.0, max_scale = 1.0;
    int sweep_cycles = 1;
    bool clutter = false;
};

int cmd_synth(const SynthArgs& a) {
    hw::synth::DatasetConfig cfg;
    cfg.n_train_ids = a.train_ids;
    cfg.n_test_ids = a.test_ids;
    cfg.pattern_size = a.pattern_size;
    cfg.canvas = a.canvas;
    cfg.fps = a.fps;
    cfg.video_seconds = a.seconds;
    cfg.n_train_pairs = a.train_pairs;
    cfg.n_test_pairs = a.test_pairs;
    if (a.transform == "translate")
        cfg.transform.kind = hw::synth::TransformKind::Translate;
    else if (a.transform == "rotate")
        cfg.transform.kind = hw::synth::TransformKind::Rotate;
    else if (a.transform == "scale")
        cfg.transform.kind = hw::synth::TransformKind::Scale;
    else if (a.transform == "mixed")
        cfg.transform.kind = hw::synth::TransformKind::Mixed;
    else
        throw CLI::ValidationError("--transform", "expected translate|rotate|scale|mixed");
    cfg.transform.max_translate = a.max_translate;
    cfg.transform.max_rotate_deg = a.max_rotate;
    cfg.transform.min_scale = a.min_scale;
    cfg.transform.max_scale = a.max_scale;
    cfg.transform.sweep_cycles = a.sweep_cycles;
    cfg.clutter.mode = a.clutter ? hw::synth::ClutterMode::Clutter : hw::synth::ClutterMode::Uniform;

    const hw::synth::SynthDataset ds = hw::synth::gen_dataset(cfg, a.seed);

    const fs::path out = a.out;
    fs::create_directories(out / "videos");
    fs::create_directories(out / "images");

    json videos;
    videos["entries"] = json::array();
    for (const auto& v : ds.train_videos) {
        const fs::path vdir = out / "videos" / v.video_id;
        fs::create_directories(vdir);
        json entry;
        entry["videoId"] = v.video_id;
        entry["fps"] = v.fps;
        entry["frames"] = json::array();
        for (std::size_t i = 0; i < v.frames.size(); ++i) {
            const std::string rel = "videos/" + v.video_id + "/f" + std::to_string(i) + ".pgm";
            save_pgm_u8(out / rel, v.frames[i]);
            entry["frames"].push_back(rel);
        }
        videos["entries"].push_back(std::move(entry));
    }
    hw::bundle::atomic_write(out / "videos.json", videos.dump(2) + "\n");

    std::ostringstream items;
    auto dump_images = [&](const std::vector<hw::synth::LabeledImage>& list) {
        for (const auto& li : list) {
            const std::string rel = "images/" + li.item_id + ".pgm";
            save_pgm_u8(out / rel, li.image);
            items << li.item_id << ',' << rel << '\n';
        }
    };
    dump_images(ds.train_eval_images);
    dump_images(ds.test_images);
    hw::bundle::atomic_write(out / "items.csv", items.str());

    auto dump_pairs = [&](const fs::path& path, const std::vector<hw::eval::Pair>& pairs) {
        std::ostringstream csv;
        for (const auto& p : pairs)
            csv << p.item_a << ',' << p.item_b << ','
                << (p.label == hw::eval::PairLabel::Same ? "same" : "diff") << '\n';
        hw::bundle::atomic_write(path, csv.str());
    };
    dump_pairs(out / "train_pairs.csv", ds.train_pairs);
    dump_pairs(out / "test_pairs.csv", ds.test_pairs);
    hw::bundle::atomic_write(out / "manifest.json", ds.manifest_json);
    return 0;
}

struct BuildL2Args {
    std::string videos, out, lowlevel = "gabor";
    std::uint64_t seed = 0;
    int patch_height = 24, patch_width = 24, variants = 5;
    int max_patches = 0;   // 0 = all frames
    int reduce_k = 0;      // 0 = no reduced basis
    int resize_height = 0; // 0 = native frame height
    std::vector<double> ratios;
};

int cmd_build_l2(const BuildL2Args& a) {
    const hw::bundle::VideoManifest manifest = hw::bundle::load_video_manifest(a.videos);

    std::vector<hw::Image> frames;
    for (const auto& e : manifest.entries)
        for (const auto& p : e.frame_paths) frames.push_back(hw::imagecore::load_image(p));

    if (a.max_patches > 0 && static_cast<int>(frames.size()) > a.max_patches) {
        // Deterministic subsample of the base frames.
        std::mt19937_64 rng(a.seed);
        std::shuffle(frames.begin(), frames.end(), rng);
        frames.resize(static_cast<std::size_t>(a.max_patches));
    }

    hw::bundle::Layer2Pipeline pipe;
    pipe.lowlevel.kind = parse_lowlevel(a.lowlevel);
    pipe.resize_height = a.resize_height > 0 ? a.resize_height : frames.front().height;
    pipe.pyramid_ratios = a.ratios.empty() ? hw::bundle::face_pyramid_ratios() : a.ratios;

    if (pipe.lowlevel.kind == hw::features::LowLevelKind::Pca) {
        const auto patches = hw::features::sample_patches(
            frames, pipe.lowlevel.pca.patch_size, pipe.lowlevel.pca.train_patch_count, a.seed);
        pipe.pca_bank =
            hw::features::pca_fit_filters(patches, pipe.lowlevel.pca.filter_count,
                                          pipe.lowlevel.pca.patch_size,
                                          pipe.lowlevel.pca.patch_size);
    }

    // In-plane rotated variants of a central crop, one base per frame.
    std::vector<hw::Image> patches;
    const std::vector<double> rotations{-18.0, -9.0, 0.0, 9.0, 18.0};
    const int variants = std::min<int>(a.variants, static_cast<int>(rotations.size()));
    for (const auto& frame : frames) {
        const hw::Image gray =
            frame.channels == 1 ? frame : hw::imagecore::to_grayscale(frame);
        if (gray.width < a.patch_width || gray.height < a.patch_height)
            throw DataError("frame smaller than the requested patch size");
        const int x0 = (gray.width - a.patch_width) / 2;
        const int y0 = (gray.height - a.patch_height) / 2;
        hw::Image crop(a.patch_width, a.patch_height, 1);
        for (int y = 0; y < a.patch_height; ++y)
            for (int x = 0; x < a.patch_width; ++x)
                crop.at(x, y, 0) = gray.at(x0 + x, y0 + y, 0);
        for (int v = 0; v < variants; ++v)
            patches.push_back(hw::hwcore::rotate_about_center(crop, rotations[v]));
    }

    const hw::features::FilterBank* pca = pipe.pca_bank.filters.empty() ? nullptr : &pipe.pca_bank;
    pipe.bank = hw::hwcore::build_layer2_bank(patches, variants, [&](const hw::Image& p) {
        return hw::features::extract(p, pipe.lowlevel, pca);
    });
    if (a.reduce_k > 0) pipe.bank.reduced = hw::hwcore::fit_template_pca(pipe.bank, a.reduce_k);

    hw::bundle::save_layer2(a.out, pipe);
    return 0;
}

struct BuildL3Args {
    std::string videos, l2, out;
    double window = 10.0;
    std::string placement = "even";
    int m = 0;
    std::string pooling = "mean";
    double lp = 2.0;
    bool scramble = false;
    std::uint64_t scramble_seed = 0;
};

int cmd_build_l3(const BuildL3Args& a) {
    const hw::bundle::VideoManifest manifest = hw::bundle::load_video_manifest(a.videos);
    const hw::bundle::Layer2Pipeline l2 = hw::bundle::load_layer2(a.l2);

    std::vector<hw::temporal::FrameSequence> seqs;
    std::vector<hw::temporal::ComplexCellPlan> plans;
    std::map<std::string, const hw::bundle::VideoManifestEntry*> by_id;
    for (const auto& e : manifest.entries) {
        by_id[e.video_id] = &e;
        hw::temporal::FrameSequence seq;
        seq.video_id = e.video_id;
        seq.fps = e.fps;
        for (int i = 0; i < static_cast<int>(e.frame_paths.size()); ++i)
            seq.frames.push_back({i, e.frame_paths[static_cast<std::size_t>(i)]});
        if (a.placement == "even")
            plans.push_back(hw::temporal::plan_even_nonoverlap(seq, a.window));
        else if (a.placement == "fixed-m")
            plans.push_back(hw::temporal::plan_fixed_m(seq, a.window, a.m));
        else
            throw CLI::ValidationError("--placement", "expected even|fixed-m");
        seqs.push_back(std::move(seq));
    }
    if (a.scramble) plans = hw::temporal::scramble_assignment(plans, a.scramble_seed);

    const hw::temporal::Layer2Encoder encoder = [&](const std::string& video_id, int frame) {
        const auto* entry = by_id.at(video_id);
        const hw::Image img =
            hw::imagecore::load_image(entry->frame_paths.at(static_cast<std::size_t>(frame)));
        return encode_image_l2(l2, img);
    };

    hw::bundle::Layer3Pipeline pipe;
    pipe.model = hw::temporal::learn_layer3(seqs, plans, encoder);
    pipe.model.pooling = parse_pooling(a.pooling, a.lp);
    hw::bundle::save_layer3(a.out, pipe);
    return 0;
}

struct SignatureArgs {
    std::string l2, l3, items, out;
};

int cmd_signature(const SignatureArgs& a) {
    const Encoder enc = load_encoder(a.l2, a.l3);
    std::vector<std::pair<std::string, std::vector<float>>> rows;
    for (const auto& [item, path] : load_items_csv(a.items)) rows.emplace_back(item, enc(path));
    save_signature_csv(a.out, rows);
    return 0;
}

struct VerifyArgs {
    std::string l2, l3, sig, items, train_pairs, test_pairs, out;
};

std::map<std::string, std::vector<float>> gather_signatures(const std::string& sig_csv,
                                                            const std::string& l2,
                                                            const std::string& l3,
                                                            const std::string& items) {
    if (!sig_csv.empty()) return load_signature_csv(sig_csv);
    if (l2.empty() || items.empty())
        throw CLI::ValidationError("", "need either --signatures or --l2 with --items");
    const Encoder enc = load_encoder(l2, l3);
    std::map<std::string, std::vector<float>> sigs;
    for (const auto& [item, path] : load_items_csv(items)) sigs[item] = enc(path);
    return sigs;
}

int cmd_verify(const VerifyArgs& a) {
    const auto sigs = gather_signatures(a.sig, a.l2, a.l3, a.items);
    const auto train = hw::bundle::load_pairs_csv(a.train_pairs);
    const auto test = hw::bundle::load_pairs_csv(a.test_pairs);

    const hw::eval::ThresholdModel model = hw::eval::fit_threshold(score_pairs(sigs, train));
    const hw::eval::VerifyReport report = hw::eval::verify(score_pairs(sigs, test), model);

    json j;
    j["threshold"] = model.decision_threshold;
    j["trainAccuracy"] = model.train_accuracy;
    j["testAccuracy"] = report.accuracy;
    j["testPairs"] = test.size();
    hw::bundle::atomic_write(a.out, j.dump(2) + "\n");
    return 0;
}

struct SweepArgs {
    std::string out;
    std::uint64_t seed = 0;
    std::vector<double> windows{0.0, 2.0, 10.0, 60.0};
};

int cmd_sweep_pooling(const SweepArgs& a) {
    const hw::experiments::TrendConfig cfg;
    const std::vector<double> acc = hw::experiments::run_pooling_sweep(a.seed, a.windows, cfg);
    std::ostringstream csv;
    csv << "windowSeconds,accuracy\n";
    for (std::size_t i = 0; i < a.windows.size(); ++i)
        csv << a.windows[i] << ',' << acc[i] << '\n';
    hw::bundle::atomic_write(a.out, csv.str());
    return 0;
}

struct ScrambleArgs {
    std::string out;
    std::uint64_t seed = 0;
    double window = 10.0;
};

int cmd_scramble_control(const ScrambleArgs& a) {
    const hw::experiments::TrendConfig cfg;
    const auto r = hw::experiments::run_scramble_control(a.seed, cfg, a.window);
    std::ostringstream csv;
    csv << "condition,accuracy\n";
    csv << "pooling," << r.intact_accuracy << '\n';
    csv << "no_pooling," << r.no_pooling_accuracy << '\n';
    csv << "scrambled," << r.scrambled_accuracy << '\n';
    hw::bundle::atomic_write(a.out, csv.str());
    return 0;
}

struct GateArgs {
    std::string l2, pos_items, neg_items, out;
    std::vector<double> p_grid{1.0, 2.0, 5.0};
};

int cmd_gate(const GateArgs& a) {
    const Encoder enc = load_encoder(a.l2, "");
    std::vector<std::vector<float>> pos, neg;
    for (const auto& [item, path] : load_items_csv(a.pos_items)) pos.push_back(enc(path));
    for (const auto& [item, path] : load_items_csv(a.neg_items)) neg.push_back(enc(path));

    std::ostringstream csv;
    csv << "p,auc\n";
    for (double p : a.p_grid) {
        std::vector<double> scores;
        std::vector<bool> positive;
        for (const auto& v : pos) {
            scores.push_back(hw::eval::gate_score(v, p));
            positive.push_back(true);
        }
        for (const auto& v : neg) {
            scores.push_back(hw::eval::gate_score(v, p));
            positive.push_back(false);
        }
        csv << p << ',' << hw::eval::roc_auc(scores, positive).auc << '\n';
    }
    hw::bundle::atomic_write(a.out, csv.str());
    return 0;
}

struct FuseArgs {
    std::vector<std::string> sig_csvs;
    std::string train_pairs, test_pairs, out;
};

int cmd_fuse(const FuseArgs& a) {
    if (a.sig_csvs.size() < 2)
        throw CLI::ValidationError("--signatures", "need at least two pipelines");
    std::vector<std::map<std::string, std::vector<float>>> sigs;
    for (const auto& path : a.sig_csvs) sigs.push_back(load_signature_csv(path));

    const auto train = hw::bundle::load_pairs_csv(a.train_pairs);
    const auto test = hw::bundle::load_pairs_csv(a.test_pairs);

    std::vector<hw::eval::PipelinePairSignatures> pipelines(sigs.size());
    std::vector<hw::eval::PairLabel> labels;
    for (const auto& p : train) {
        for (std::size_t k = 0; k < sigs.size(); ++k)
            pipelines[k].push_back(hw::eval::PipelinePairSignatures::value_type{
                sig_of(sigs[k], p.item_a), sig_of(sigs[k], p.item_b)});
        labels.push_back(p.label);
    }
    const hw::eval::FusionWeights weights = hw::eval::fit_fusion(pipelines, labels);

    auto fused_scores = [&](const std::vector<hw::eval::Pair>& pairs) {
        std::vector<hw::eval::ScoredPair> scored;
        for (const auto& p : pairs) {
            std::vector<std::vector<float>> a_sigs, b_sigs;
            for (const auto& s : sigs) {
                a_sigs.push_back(sig_of(s, p.item_a));
                b_sigs.push_back(sig_of(s, p.item_b));
            }
            scored.push_back({hw::eval::pair_score(hw::eval::fuse(a_sigs, weights),
                                                   hw::eval::fuse(b_sigs, weights)),
                              p.label});
        }
        return scored;
    };
    const hw::eval::ThresholdModel model = hw::eval::fit_threshold(fused_scores(train));
    const hw::eval::VerifyReport report = hw::eval::verify(fused_scores(test), model);

    json j;
    j["weights"] = weights.weights;
    j["threshold"] = model.decision_threshold;
    j["trainAccuracy"] = model.train_accuracy;
    j["testAccuracy"] = report.accuracy;
    hw::bundle::atomic_write(a.out, j.dump(2) + "\n");
    return 0;
}

struct ClassifyArgs {
    std::string train_sig, train_labels, test_sig, test_labels, out;
    double lambda = 1e-4;
    int epochs = 100;
    std::uint64_t seed = 0;
};

// labels CSV: `item,+1|-1`.
std::map<std::string, int> load_labels_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::map<std::string, int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path.string() + ": malformed label line: " + line);
        const std::string v = line.substr(comma + 1);
        if (v != "+1" && v != "1" && v != "-1")
            throw DataError(path.string() + ": labels must be +1 or -1, got " + v);
        labels[line.substr(0, comma)] = v == "-1" ? -1 : 1;
    }
    if (labels.empty()) throw DataError(path.string() + ": no labels");
    return labels;
}

int cmd_classify(const ClassifyArgs& a) {
    const auto train_sigs = load_signature_csv(a.train_sig);
    const auto train_labels = load_labels_csv(a.train_labels);

    std::vector<std::vector<float>> xs;
    std::vector<int> ys;
    for (const auto& [item, label] : train_labels) {
        xs.push_back(sig_of(train_sigs, item));
        ys.push_back(label);
    }
    const hw::eval::LinearModel model = hw::eval::svm_train(xs, ys, a.lambda, a.epochs, a.seed);

    auto accuracy_on = [&](const std::map<std::string, std::vector<float>>& sigs,
                           const std::map<std::string, int>& labels) {
        int ok = 0;
        for (const auto& [item, label] : labels)
            if (hw::eval::svm_predict(model, sig_of(sigs, item)).label == label) ++ok;
        return static_cast<double>(ok) / static_cast<double>(labels.size());
    };

    json j;
    j["lambda"] = a.lambda;
    j["epochs"] = a.epochs;
    j["trainAccuracy"] = accuracy_on(train_sigs, train_labels);
    j["finalObjective"] = model.epoch_objectives.back();
    if (!a.test_sig.empty()) {
        if (a.test_labels.empty())
            throw CLI::ValidationError("--test-labels", "required with --test-signatures");
        j["testAccuracy"] = accuracy_on(load_signature_csv(a.test_sig),
                                        load_labels_csv(a.test_labels));
    }
    hw::bundle::atomic_write(a.out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signature-architecture pipeline driver"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic verification dataset");
    s->add_option("--out", synth.out)->required();
    s->add_option("--seed", synth.seed)->required();
    s->add_option("--train-ids", synth.train_ids);
    s->add_option("--test-ids", synth.test_ids);
    s->add_option("--pattern-size", synth.pattern_size);
    s->add_option("--canvas", synth.canvas);
    s->add_option("--fps", synth.fps);
    s->add_option("--seconds", synth.seconds);
    s->add_option("--train-pairs", synth.train_pairs);
    s->add_option("--test-pairs", synth.test_pairs);
    s->add_option("--transform", synth.transform);
    s->add_option("--max-translate", synth.max_translate);
    s->add_option("--max-rotate", synth.max_rotate);
    s->add_option("--min-scale", synth.min_scale);
    s->add_option("--max-scale", synth.max_scale);
    s->add_option("--sweep-cycles", synth.sweep_cycles);
    s->add_flag("--clutter", synth.clutter);

    BuildL2Args l2;
    auto* b2 = app.add_subcommand("build-l2", "Build a layer-2 template bank from videos");
    b2->add_option("--videos", l2.videos)->required();
    b2->add_option("--out", l2.out)->required();
    b2->add_option("--seed", l2.seed)->required();
    b2->add_option("--lowlevel", l2.lowlevel);
    b2->add_option("--patch-height", l2.patch_height);
    b2->add_option("--patch-width", l2.patch_width);
    b2->add_option("--variants", l2.variants);
    b2->add_option("--max-patches", l2.max_patches);
    b2->add_option("--reduce-k", l2.reduce_k);
    b2->add_option("--resize-height", l2.resize_height);
    b2->add_option("--ratios", l2.ratios)->delimiter(',');

    BuildL3Args l3;
    auto* b3 = app.add_subcommand("build-l3", "Learn layer-3 temporal pooling cells");
    b3->add_option("--videos", l3.videos)->required();
    b3->add_option("--l2", l3.l2)->required();
    b3->add_option("--out", l3.out)->required();
    b3->add_option("--window", l3.window);
    b3->add_option("--placement", l3.placement);
    b3->add_option("--m", l3.m);
    b3->add_option("--pooling", l3.pooling);
    b3->add_option("--lp", l3.lp);
    b3->add_flag("--scramble", l3.scramble);
    b3->add_option("--scramble-seed", l3.scramble_seed);

    SignatureArgs sig;
    auto* sg = app.add_subcommand("signature", "Write signatures for an item list");
    sg->add_option("--l2", sig.l2)->required();
    sg->add_option("--l3", sig.l3);
    sg->add_option("--items", sig.items)->required();
    sg->add_option("--out", sig.out)->required();

    VerifyArgs verify;
    auto* vf = app.add_subcommand("verify", "Thresholded-cosine pair verification");
    vf->add_option("--signatures", verify.sig);
    vf->add_option("--l2", verify.l2);
    vf->add_option("--l3", verify.l3);
    vf->add_option("--items", verify.items);
    vf->add_option("--train-pairs", verify.train_pairs)->required();
    vf->add_option("--test-pairs", verify.test_pairs)->required();
    vf->add_option("--out", verify.out)->required();

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep-pooling", "Accuracy vs temporal pooling window");
    sw->add_option("--out", sweep.out)->required();
    sw->add_option("--seed", sweep.seed)->required();
    sw->add_option("--windows", sweep.windows)->delimiter(',');

    ScrambleArgs scramble;
    auto* sc = app.add_subcommand("scramble-control", "Intact vs scrambled frame assignment");
    sc->add_option("--out", scramble.out)->required();
    sc->add_option("--seed", scramble.seed)->required();
    sc->add_option("--window", scramble.window);

    GateArgs gate;
    auto* gt = app.add_subcommand("gate", "Class-presence gating AUC over a p grid");
    gt->add_option("--l2", gate.l2)->required();
    gt->add_option("--pos-items", gate.pos_items)->required();
    gt->add_option("--neg-items", gate.neg_items)->required();
    gt->add_option("--out", gate.out)->required();
    gt->add_option("--p-grid", gate.p_grid)->delimiter(',');

    FuseArgs fuse;
    auto* fu = app.add_subcommand("fuse", "Weighted fusion of several signature pipelines");
    fu->add_option("--signatures", fuse.sig_csvs)->required()->expected(-2);
    fu->add_option("--train-pairs", fuse.train_pairs)->required();
    fu->add_option("--test-pairs", fuse.test_pairs)->required();
    fu->add_option("--out", fuse.out)->required();

    ClassifyArgs classify;
    auto* cl = app.add_subcommand("classify", "Linear SVM on signatures");
    cl->add_option("--train-signatures", classify.train_sig)->required();
    cl->add_option("--train-labels", classify.train_labels)->required();
    cl->add_option("--test-signatures", classify.test_sig);
    cl->add_option("--test-labels", classify.test_labels);
    cl->add_option("--out", classify.out)->required();
    cl->add_option("--lambda", classify.lambda);
    cl->add_option("--epochs", classify.epochs);
    cl->add_option("--seed", classify.seed)->required();

    try {
        app.parse(argc, argv);
        if (s->parsed()) return cmd_synth(synth);
        if (b2->parsed()) return cmd_build_l2(l2);
        if (b3->parsed()) return cmd_build_l3(l3);
        if (sg->parsed()) return cmd_signature(sig);
        if (vf->parsed()) return cmd_verify(verify);
        if (sw->parsed()) return cmd_sweep_pooling(sweep);
        if (sc->parsed()) return cmd_scramble_control(scramble);
        if (gt->parsed()) return cmd_gate(gate);
        if (fu->parsed()) return cmd_fuse(fuse);
        if (cl->parsed()) return cmd_classify(classify);
        std::cerr << "no command\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const hw::bundle::ModelMismatchError& e) {
        std::cerr << "model mismatch: " << e.what() << '\n';
        return 4;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
