#include "specdet/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "specdet/rng.hpp"

namespace specdet {

namespace {

double sigmoid(double z) {
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

void check_training_set(const std::vector<FeatureVector>& features,
                        const std::vector<int>& labels) {
    if (features.size() != labels.size())
        throw ShapeError("train: feature/label count mismatch");
    if (features.size() < 2)
        throw TrainError("train: need at least two samples");
    const std::size_t dim = features.front().dim();
    for (const auto& f : features)
        if (f.dim() != dim)
            throw ShapeError("train: mixed feature dimensions");
    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y == 0)
            has0 = true;
        else if (y == 1)
            has1 = true;
        else
            throw TrainError("train: labels must be 0 or 1");
    }
    if (!has0 || !has1)
        throw TrainError("train: both classes must be present");
}

} // namespace

FeatureVector flatten_spectrum(const EnhancedSpectrum& spec) {
    FeatureVector f;
    f.values = spec.values;
    f.source = FeatureSource::spectrum;
    return f;
}

std::pair<std::vector<double>, std::vector<double>>
fit_standardizer(const std::vector<FeatureVector>& features) {
    if (features.size() < 2)
        throw ShapeError("fit_standardizer: need at least two vectors");
    const std::size_t dim = features.front().dim();
    for (const auto& f : features)
        if (f.dim() != dim)
            throw ShapeError("fit_standardizer: mixed dimensions");

    // Welford, per dimension.
    std::vector<double> mean(dim, 0.0), m2(dim, 0.0);
    double count = 0.0;
    for (const auto& f : features) {
        count += 1.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double delta = f.values[d] - mean[d];
            mean[d] += delta / count;
            m2[d] += delta * (f.values[d] - mean[d]);
        }
    }

    std::vector<double> std_dev(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double s = std::sqrt(m2[d] / count);
        std_dev[d] = s < 1e-9 ? 1.0 : s;
    }
    return {std::move(mean), std::move(std_dev)};
}

double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<double>& samples, std::size_t dim,
                     std::span<const int> labels, double l2) {
    const std::size_t m = labels.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* x = samples.data() + i * dim;
        double z = bias;
        for (std::size_t d = 0; d < dim; ++d)
            z += weights[d] * x[d];
        // BCE in logit form: softplus(z) - y*z.
        loss += softplus(z) - labels[i] * z;
    }
    loss /= static_cast<double>(m);
    double wsq = 0.0;
    for (double w : weights)
        wsq += w * w;
    return loss + 0.5 * l2 * wsq;
}

void logistic_grad(std::span<const double> weights, double bias,
                   const std::vector<double>& samples, std::size_t dim,
                   std::span<const int> labels, double l2,
                   std::span<double> grad_w, double& grad_b) {
    const std::size_t m = labels.size();
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* x = samples.data() + i * dim;
        double z = bias;
        for (std::size_t d = 0; d < dim; ++d)
            z += weights[d] * x[d];
        const double err = sigmoid(z) - labels[i];
        for (std::size_t d = 0; d < dim; ++d)
            grad_w[d] += err * x[d];
        grad_b += err;
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t d = 0; d < dim; ++d)
        grad_w[d] = grad_w[d] * inv_m + l2 * weights[d];
    grad_b *= inv_m;
}

ClassifierModel train(const std::vector<FeatureVector>& features,
                      const std::vector<int>& labels, const TrainConfig& cfg) {
    check_training_set(features, labels);
    if (!(cfg.learning_rate > 0.0) || cfg.epochs < 1 || cfg.batch_size < 1 || cfg.l2 < 0.0)
        throw DomainError("train: invalid config");

    const std::size_t m = features.size();
    const std::size_t dim = features.front().dim();

    auto [mean, std_dev] = fit_standardizer(features);

    std::vector<double> x(m * dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            x[i * dim + d] = (features[i].values[d] - mean[d]) / std_dev[d];

    std::vector<double> w(dim, 0.0);
    double b = 0.0;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> batch_x;
    std::vector<int> batch_y;
    std::vector<double> grad_w(dim);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        SplitMix64 rng(cfg.seed + static_cast<std::uint64_t>(epoch));
        for (std::size_t i = m - 1; i > 0; --i)
            std::swap(order[i], order[rng.next_below(i + 1)]);

        for (std::size_t start = 0; start < m; start += cfg.batch_size) {
            const std::size_t end = std::min(m, start + cfg.batch_size);
            const std::size_t bsz = end - start;
            batch_x.resize(bsz * dim);
            batch_y.resize(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                const std::size_t src = order[start + i];
                std::copy_n(x.data() + src * dim, dim, batch_x.data() + i * dim);
                batch_y[i] = labels[src];
            }

            double grad_b = 0.0;
            logistic_grad(w, b, batch_x, dim, batch_y, cfg.l2, grad_w, grad_b);
            for (std::size_t d = 0; d < dim; ++d)
                w[d] -= cfg.learning_rate * grad_w[d];
            b -= cfg.learning_rate * grad_b;
        }
    }

    ClassifierModel model;
    model.source = features.front().source;
    model.mean = std::move(mean);
    model.std_dev = std::move(std_dev);
    model.weights = std::move(w);
    model.bias = b;
    return model;
}

double score(const ClassifierModel& model, const FeatureVector& f) {
    if (f.dim() != model.dim())
        throw ShapeError("score: feature dimension mismatch");
    if (f.source != model.source)
        throw ShapeError("score: feature source mismatch");

    double z = model.bias;
    for (std::size_t d = 0; d < model.dim(); ++d)
        z += model.weights[d] * (f.values[d] - model.mean[d]) / model.std_dev[d];
    return sigmoid(z);
}

double model_loss(const ClassifierModel& model, const std::vector<FeatureVector>& features,
                  const std::vector<int>& labels, double l2) {
    if (features.size() != labels.size() || features.empty())
        throw ShapeError("model_loss: bad input sizes");
    const std::size_t dim = model.dim();
    std::vector<double> x(features.size() * dim);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].dim() != dim)
            throw ShapeError("model_loss: feature dimension mismatch");
        for (std::size_t d = 0; d < dim; ++d)
            x[i * dim + d] = (features[i].values[d] - model.mean[d]) / model.std_dev[d];
    }
    return logistic_loss(model.weights, model.bias, x, dim, labels, l2);
}

namespace {

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64le(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

double get_f64le(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

} // namespace

std::vector<std::uint8_t> save_model(const ClassifierModel& model) {
    std::vector<std::uint8_t> out;
    const std::size_t d = model.dim();
    out.reserve(9 + d * 24 + 8);
    out.insert(out.end(), {'C', 'L', 'F', '1'});
    out.push_back(static_cast<std::uint8_t>(model.source));
    put_u32le(out, static_cast<std::uint32_t>(d));
    for (double v : model.mean)
        put_f64le(out, v);
    for (double v : model.std_dev)
        put_f64le(out, v);
    for (double v : model.weights)
        put_f64le(out, v);
    put_f64le(out, model.bias);
    return out;
}

ClassifierModel load_model(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 9 || std::memcmp(bytes.data(), "CLF1", 4) != 0)
        throw FormatError("clf: bad magic");
    const std::uint8_t tag = bytes[4];
    if (tag > 1)
        throw FormatError("clf: unknown source tag");
    std::uint32_t d = 0;
    for (int i = 0; i < 4; ++i)
        d |= static_cast<std::uint32_t>(bytes[5 + i]) << (8 * i);
    const std::size_t expected = 9 + static_cast<std::size_t>(d) * 24 + 8;
    if (bytes.size() != expected)
        throw FormatError("clf: payload length mismatch");

    ClassifierModel model;
    model.source = static_cast<FeatureSource>(tag);
    model.mean.resize(d);
    model.std_dev.resize(d);
    model.weights.resize(d);
    const std::uint8_t* p = bytes.data() + 9;
    for (std::uint32_t i = 0; i < d; ++i, p += 8)
        model.mean[i] = get_f64le(p);
    for (std::uint32_t i = 0; i < d; ++i, p += 8)
        model.std_dev[i] = get_f64le(p);
    for (std::uint32_t i = 0; i < d; ++i, p += 8)
        model.weights[i] = get_f64le(p);
    model.bias = get_f64le(p);
    return model;
}

void write_model(const std::filesystem::path& path, const ClassifierModel& model) {
    write_file(path, save_model(model));
}

ClassifierModel read_model(const std::filesystem::path& path) {
    return load_model(read_file(path));
}

} // namespace specdet
