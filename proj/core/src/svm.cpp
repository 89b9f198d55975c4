#include "hw/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace hw::eval {

namespace {
double margin_of(const LinearModel& m, std::span<const float> x) {
    double s = m.bias;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(m.weights[i]) * x[i];
    return s;
}
}  // namespace

double svm_objective(const LinearModel& model, const std::vector<std::vector<float>>& features,
                     const std::vector<int>& labels) {
    double reg = 0.0;
    for (float w : model.weights) reg += static_cast<double>(w) * w;
    double hinge = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i)
        hinge += std::max(0.0, 1.0 - labels[i] * margin_of(model, features[i]));
    return 0.5 * model.lambda * reg + hinge / static_cast<double>(features.size());
}

LinearModel svm_train(const std::vector<std::vector<float>>& features,
                      const std::vector<int>& labels, double lambda, int epochs,
                      std::uint64_t seed) {
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("svm_train: bad input sizes");
    if (!(lambda > 0.0)) throw std::invalid_argument("svm_train: lambda must be positive");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw std::invalid_argument("svm_train: labels must be +1/-1");
    }
    if (!has_pos || !has_neg) throw std::invalid_argument("svm_train: both classes required");

    const std::size_t dim = features.front().size();
    for (const auto& f : features)
        if (f.size() != dim) throw std::invalid_argument("svm_train: ragged features");

    LinearModel model;
    model.lambda = lambda;
    model.weights.assign(dim, 0.0f);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);

    long t = 1;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const double eta = 1.0 / (lambda * t);
            const std::vector<float>& x = features[idx];
            const int y = labels[idx];
            const bool violated = y * margin_of(model, x) < 1.0;
            const double shrink = 1.0 - eta * lambda;
            for (std::size_t i = 0; i < dim; ++i) {
                double w = model.weights[i] * shrink;
                if (violated) w += eta * y * x[i];
                model.weights[i] = static_cast<float>(w);
            }
            if (violated) model.bias += eta * y;
            ++t;
        }
        model.epoch_objectives.push_back(svm_objective(model, features, labels));
    }
    return model;
}

SvmPrediction svm_predict(const LinearModel& model, std::span<const float> feature) {
    if (feature.size() != model.weights.size())
        throw std::invalid_argument("svm_predict: dimension mismatch");
    const double m = margin_of(model, feature);
    return SvmPrediction{m >= 0.0 ? 1 : -1, m};
}

}  // namespace hw::eval
