#include "hw/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace hw::eval {

double pair_score(std::span<const float> sig_a, std::span<const float> sig_b) {
    return hwcore::normalized_dot(sig_a, sig_b);
}

ThresholdModel fit_threshold(const std::vector<ScoredPair>& train) {
    std::size_t n_same = 0, n_diff = 0;
    for (const auto& p : train) (p.label == PairLabel::Same ? n_same : n_diff)++;
    if (n_same == 0 || n_diff == 0)
        throw std::invalid_argument("fit_threshold: both classes required");

    std::vector<ScoredPair> sorted = train;
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoredPair& a, const ScoredPair& b) { return a.score < b.score; });

    // Distinct score values and, per value, the class counts at that value.
    std::vector<double> values;
    std::vector<std::size_t> same_at, diff_at;
    for (const auto& p : sorted) {
        if (values.empty() || p.score != values.back()) {
            values.push_back(p.score);
            same_at.push_back(0);
            diff_at.push_back(0);
        }
        (p.label == PairLabel::Same ? same_at.back() : diff_at.back())++;
    }

    // Intervals between adjacent distinct values (plus both extremes). For a
    // threshold inside interval i, scores strictly above it are values[i..].
    const std::size_t k = values.size();
    double best_acc = -1.0, best_width = -1.0, best_thr = 0.0;
    std::size_t same_above = n_same, diff_above = n_diff;
    for (std::size_t i = 0; i <= k; ++i) {
        // i = 0: threshold below every score; i = k: above every score.
        const std::size_t correct = same_above + (n_diff - diff_above);
        const double acc = static_cast<double>(correct) / train.size();
        double width, thr;
        if (i == 0) {
            width = std::numeric_limits<double>::infinity();
            thr = values.front() - 1.0;
        } else if (i == k) {
            width = std::numeric_limits<double>::infinity();
            thr = values.back() + 1.0;
        } else {
            width = values[i] - values[i - 1];
            thr = 0.5 * (values[i - 1] + values[i]);
        }
        if (acc > best_acc || (acc == best_acc && width > best_width)) {
            best_acc = acc;
            best_width = width;
            best_thr = thr;
        }
        if (i < k) {
            same_above -= same_at[i];
            diff_above -= diff_at[i];
        }
    }
    return ThresholdModel{best_thr, best_acc};
}

VerifyReport verify(const std::vector<ScoredPair>& pairs, const ThresholdModel& model) {
    VerifyReport report;
    std::size_t correct = 0;
    report.decisions.reserve(pairs.size());
    for (const auto& p : pairs) {
        const bool same = p.score > model.decision_threshold;
        report.decisions.push_back(same);
        if (same == (p.label == PairLabel::Same)) ++correct;
    }
    report.accuracy = pairs.empty() ? 0.0 : static_cast<double>(correct) / pairs.size();
    return report;
}

VerifyReport verify_folds(const std::vector<std::vector<ScoredPair>>& folds,
                          const ThresholdModel& model) {
    VerifyReport report;
    std::vector<double> accs;
    std::size_t total = 0, correct = 0;
    for (const auto& fold : folds) {
        const VerifyReport r = verify(fold, model);
        accs.push_back(r.accuracy);
        total += fold.size();
        correct += static_cast<std::size_t>(std::lround(r.accuracy * fold.size()));
        report.decisions.insert(report.decisions.end(), r.decisions.begin(), r.decisions.end());
    }
    report.accuracy = total == 0 ? 0.0 : static_cast<double>(correct) / total;
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= accs.empty() ? 1.0 : static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    report.fold_mean = mean;
    report.fold_sd = accs.size() > 1 ? std::sqrt(var / (accs.size() - 1)) : 0.0;
    report.has_folds = true;
    return report;
}

std::vector<float> fuse(const std::vector<std::vector<float>>& signatures,
                        const FusionWeights& weights) {
    if (signatures.size() != weights.weights.size())
        throw std::invalid_argument("fuse: pipeline/weight count mismatch");
    std::vector<float> out;
    for (std::size_t i = 0; i < signatures.size(); ++i) {
        const auto& sig = signatures[i];
        double sq = 0.0;
        for (float v : sig) sq += static_cast<double>(v) * v;
        const double norm = std::sqrt(sq);
        const double scale = norm > 0.0 ? weights.weights[i] / norm : 0.0;
        for (float v : sig) out.push_back(static_cast<float>(v * scale));
    }
    return out;
}

namespace {
void enumerate_simplex(int pipelines, int remaining, std::vector<int>& parts,
                       const std::function<void(const std::vector<int>&)>& visit) {
    if (static_cast<int>(parts.size()) == pipelines - 1) {
        parts.push_back(remaining);
        visit(parts);
        parts.pop_back();
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        parts.push_back(v);
        enumerate_simplex(pipelines, remaining - v, parts, visit);
        parts.pop_back();
    }
}
}  // namespace

FusionWeights fit_fusion(const std::vector<PipelinePairSignatures>& pipelines,
                         const std::vector<PairLabel>& labels) {
    if (pipelines.size() < 2) throw std::invalid_argument("fit_fusion: need >= 2 pipelines");
    const std::size_t n_pairs = labels.size();
    for (const auto& p : pipelines)
        if (p.size() != n_pairs)
            throw std::invalid_argument("fit_fusion: misaligned signature sets");

    constexpr int kSteps = 20;  // grid resolution 0.05
    FusionWeights best;
    double best_err = std::numeric_limits<double>::infinity();

    std::vector<int> parts;
    enumerate_simplex(static_cast<int>(pipelines.size()), kSteps, parts,
                      [&](const std::vector<int>& grid) {
                          FusionWeights w;
                          for (int g : grid) w.weights.push_back(g / static_cast<double>(kSteps));
                          std::vector<ScoredPair> scored(n_pairs);
                          for (std::size_t i = 0; i < n_pairs; ++i) {
                              std::vector<std::vector<float>> sa, sb;
                              for (const auto& p : pipelines) {
                                  sa.push_back(p[i][0]);
                                  sb.push_back(p[i][1]);
                              }
                              scored[i] = {pair_score(fuse(sa, w), fuse(sb, w)), labels[i]};
                          }
                          const double err = 1.0 - fit_threshold(scored).train_accuracy;
                          // Strict improvement keeps the lexicographically
                          // smallest vector (enumeration is lexicographic).
                          if (err < best_err) {
                              best_err = err;
                              best = w;
                          }
                      });
    return best;
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size())
        throw std::invalid_argument("roc_auc: scores/labels length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (bool p : positive) (p ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("roc_auc: both classes required");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    double auc_sum = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t neg_below = n_neg;
    std::size_t i = 0;
    while (i < order.size()) {
        const double thr = scores[order[i]];
        std::size_t pos_here = 0, neg_here = 0;
        while (i < order.size() && scores[order[i]] == thr) {
            (positive[order[i]] ? pos_here : neg_here)++;
            ++i;
        }
        neg_below -= neg_here;
        // Positives at this value beat all strictly-lower negatives and tie
        // with this value's negatives.
        auc_sum += static_cast<double>(pos_here) * (static_cast<double>(neg_below) +
                                                    0.5 * static_cast<double>(neg_here));
        tp += pos_here;
        fp += neg_here;
        curve.points.push_back({static_cast<double>(fp) / n_neg,
                                static_cast<double>(tp) / n_pos, thr});
    }
    curve.auc = auc_sum / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return curve;
}

double gate_score(std::span<const float> l2vec, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("gate_score: p must be >= 1");
    double s = 0.0;
    for (float v : l2vec) {
        const double c = std::max(0.0, static_cast<double>(v));
        s += std::pow(c, p);
    }
    return std::pow(s, 1.0 / p);
}

}  // namespace hw::eval
