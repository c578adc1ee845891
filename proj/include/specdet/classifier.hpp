#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "specdet/enhance.hpp"

namespace specdet {

enum class FeatureSource : std::uint8_t {
    spectrum = 0,
    pixel = 1,
};

struct FeatureVector {
    std::vector<double> values;
    FeatureSource source = FeatureSource::spectrum;

    std::size_t dim() const { return values.size(); }
};

// Logistic model over standardized features. Persisted bit-exactly.
struct ClassifierModel {
    FeatureSource source = FeatureSource::spectrum;
    std::vector<double> mean;
    std::vector<double> std_dev; // all > 0
    std::vector<double> weights;
    double bias = 0.0;

    std::size_t dim() const { return weights.size(); }
};

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 30;
    int batch_size = 32;
    double l2 = 1e-4;
    std::uint64_t seed = 1;
};

FeatureVector flatten_spectrum(const EnhancedSpectrum& spec);

// Per-dimension mean and population standard deviation. Dimensions with
// std below 1e-9 get std := 1 so constant features pass through unscaled.
std::pair<std::vector<double>, std::vector<double>>
fit_standardizer(const std::vector<FeatureVector>& features);

// Mean binary cross-entropy plus (l2/2)*|w|^2 over a row-major sample
// matrix. Exposed so tests can finite-difference it against the analytic
// gradient below.
double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<double>& samples, std::size_t dim,
                     std::span<const int> labels, double l2);

// Analytic gradient of logistic_loss; grad_w must have length dim.
void logistic_grad(std::span<const double> weights, double bias,
                   const std::vector<double>& samples, std::size_t dim,
                   std::span<const int> labels, double l2,
                   std::span<double> grad_w, double& grad_b);

// Mini-batch gradient descent on standardized features, shuffled per epoch
// with SplitMix64(cfg.seed + epoch). Deterministic for fixed inputs.
ClassifierModel train(const std::vector<FeatureVector>& features,
                      const std::vector<int>& labels, const TrainConfig& cfg);

// sigmoid(w . (f - mean) / std + bias), in [0, 1].
double score(const ClassifierModel& model, const FeatureVector& f);

// Training objective of a model on a labeled set (for reporting).
double model_loss(const ClassifierModel& model, const std::vector<FeatureVector>& features,
                  const std::vector<int>& labels, double l2);

// "CLF1" container: magic, source byte, D (u32 LE), mean/std/weights
// (D doubles LE each), bias (double LE).
std::vector<std::uint8_t> save_model(const ClassifierModel& model);
ClassifierModel load_model(const std::vector<std::uint8_t>& bytes);

void write_model(const std::filesystem::path& path, const ClassifierModel& model);
ClassifierModel read_model(const std::filesystem::path& path);

} // namespace specdet
