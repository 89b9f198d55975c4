#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hw::eval {

struct LinearModel {
    std::vector<float> weights;
    double bias = 0.0;
    double lambda = 1e-4;
    std::vector<double> epoch_objectives;  // full-batch objective after each epoch
};

/// L2-regularized hinge loss by seeded stochastic subgradient descent with
/// step 1/(lambda*t); the bias is unregularized.
LinearModel svm_train(const std::vector<std::vector<float>>& features,
                      const std::vector<int>& labels,  // +1 / -1, both present
                      double lambda = 1e-4, int epochs = 100, std::uint64_t seed = 0);

struct SvmPrediction {
    int label = 0;  // +1 / -1
    double margin = 0.0;
};

SvmPrediction svm_predict(const LinearModel& model, std::span<const float> feature);

/// 0.5*lambda*||w||^2 + mean hinge loss over the set.
double svm_objective(const LinearModel& model, const std::vector<std::vector<float>>& features,
                     const std::vector<int>& labels);

}  // namespace hw::eval
