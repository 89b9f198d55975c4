#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hw/hwcore.hpp"

namespace hw::eval {

enum class PairLabel { Same, Different };

struct Pair {
    std::string item_a;
    std::string item_b;
    PairLabel label = PairLabel::Same;
};

struct ScoredPair {
    double score = 0.0;
    PairLabel label = PairLabel::Same;
};

/// Cosine of two signatures.
double pair_score(std::span<const float> sig_a, std::span<const float> sig_b);

struct ThresholdModel {
    double decision_threshold = 0.0;
    double train_accuracy = 0.0;
};

/// Threshold maximizing accuracy of "score > threshold => SAME"; ties broken
/// by the midpoint of the widest gap between adjacent distinct scores.
ThresholdModel fit_threshold(const std::vector<ScoredPair>& train);

struct VerifyReport {
    double accuracy = 0.0;
    std::vector<bool> decisions;  // true = SAME
    double fold_mean = 0.0;
    double fold_sd = 0.0;
    bool has_folds = false;
};

VerifyReport verify(const std::vector<ScoredPair>& pairs, const ThresholdModel& model);
VerifyReport verify_folds(const std::vector<std::vector<ScoredPair>>& folds,
                          const ThresholdModel& model);

struct FusionWeights {
    std::vector<double> weights;  // non-negative, sum to 1
};

/// Concatenation of w_i * sig_i / ||sig_i||; zero-norm blocks stay zero.
std::vector<float> fuse(const std::vector<std::vector<float>>& signatures,
                        const FusionWeights& weights);

/// One (sig_a, sig_b) entry per training pair, for one pipeline.
using PipelinePairSignatures = std::vector<std::array<std::vector<float>, 2>>;

/// Grid search over the weight simplex at resolution 0.05, minimizing the
/// training error of the fused thresholded-cosine classifier; ties resolved
/// by the lexicographically smallest weight vector.
FusionWeights fit_fusion(const std::vector<PipelinePairSignatures>& pipelines,
                         const std::vector<PairLabel>& labels);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// AUC = P(score+ > score-) + 0.5 P(tie), exact by sorting; one curve point
/// per distinct threshold.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

/// L-p pool of the layer-2 responses clamped at 0; p = 1 is the plain sum.
double gate_score(std::span<const float> l2vec, double p);

}  // namespace hw::eval
