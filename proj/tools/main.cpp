// specdet: train and run a CNN-generated-image detector that works on
// enhanced frequency spectra, with an optional pixel-domain baseline and a
// highest-confidence ensemble of the two.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "specdet/classifier.hpp"
#include "specdet/enhance.hpp"
#include "specdet/ensemble.hpp"
#include "specdet/metrics.hpp"
#include "specdet/synthgen.hpp"

namespace fs = std::filesystem;
using namespace specdet;

namespace {

// Wrong flag combinations that CLI11 cannot express declaratively.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Line-oriented key=value config. Entries are rewritten as --key=value args
// inserted before the command-line flags; options take the last value, so
// explicit flags override the file.
std::vector<std::string> load_config_args(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path);
    std::vector<std::string> args;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("config: expected key=value, got: " + line);
        args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
    }
    return args;
}

std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0].empty() || args[0][0] == '-')
        return args;
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
        const std::vector<std::string> extra = load_config_args(config_path);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
    }
    return args;
}

struct EnhanceParams {
    int crop_size = kDefaultCropSize;
    int crop_count = kDefaultCropCount;
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 1;
};

const CLI::Validator EvenCropSize(
    [](std::string& s) -> std::string {
        int v = 0;
        try {
            v = std::stoi(s);
        } catch (...) {
            return "not a number";
        }
        if (v < 8 || v % 2 != 0)
            return "crop size must be even and at least 8";
        return {};
    },
    "EVEN>=8");

const CLI::Validator OddKernel(
    [](std::string& s) -> std::string {
        int v = 0;
        try {
            v = std::stoi(s);
        } catch (...) {
            return "not a number";
        }
        if (v < 1 || v % 2 == 0)
            return "kernel size must be odd";
        return {};
    },
    "ODD");

void add_enhance_params(CLI::App* cmd, EnhanceParams& p) {
    cmd->add_option("--crop-size", p.crop_size, "Crop size N (even, >= 8)")
        ->check(EvenCropSize)
        ->capture_default_str();
    cmd->add_option("--crops", p.crop_count, "Number of random crops L")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--epsilon", p.epsilon, "Magnitude floor inside log10")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", p.seed, "Seed for every random draw")->capture_default_str();
}

FeatureVector spectrum_feature(const Image& img, const EnhanceParams& p) {
    return flatten_spectrum(
        enhance_image(img, p.crop_size, p.crop_count, p.seed, p.epsilon));
}

FeatureVector pixel_feature(const Image& img) {
    GrayImage gray = resize_bilinear(to_gray(img), 64, 64);
    FeatureVector f;
    f.values = std::move(gray.values);
    f.source = FeatureSource::pixel;
    return f;
}

FeatureVector extract_feature(const Image& img, FeatureSource source,
                              const EnhanceParams& p) {
    return source == FeatureSource::spectrum ? spectrum_feature(img, p) : pixel_feature(img);
}

// Feature extraction over a manifest, parallel over images with
// input-order assembly. The first failure is rethrown.
std::vector<FeatureVector> extract_features(const std::vector<ManifestEntry>& entries,
                                            FeatureSource source, const EnhanceParams& p) {
    std::vector<FeatureVector> features(entries.size());
    std::vector<std::string> errors(entries.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(entries.size()); ++i) {
        try {
            features[i] = extract_feature(read_pnm(entries[i].path), source, p);
        } catch (const std::exception& e) {
            errors[i] = entries[i].path + ": " + e.what();
        }
    }
    for (const auto& err : errors)
        if (!err.empty())
            throw Error(err);
    return features;
}

int run_synth(const SynthConfig& cfg, const std::string& out_dir) {
    const DatasetManifest manifest = build_dataset(cfg, out_dir);
    std::printf("manifest=%s entries=%zu\n", (fs::path(out_dir) / "manifest.csv").c_str(),
                manifest.entries.size());
    return 0;
}

int run_enhance(const std::string& input, const std::string& out_esp,
                const std::string& dump_pgm, std::optional<double> lo,
                std::optional<double> hi, const EnhanceParams& p) {
    const Image img = read_pnm(input);
    const EnhancedSpectrum spec =
        enhance_image(img, p.crop_size, p.crop_count, p.seed, p.epsilon);
    write_spectrum(out_esp, spec);

    if (!dump_pgm.empty()) {
        const EnhancedSpectrum shifted = center_shift(spec);
        const auto [min_it, max_it] =
            std::minmax_element(shifted.values.begin(), shifted.values.end());
        double dump_lo = lo.value_or(*min_it);
        double dump_hi = hi.value_or(*max_it);
        if (!(dump_hi > dump_lo))
            dump_hi = dump_lo + 1.0; // flat spectrum renders black
        GrayImage viz;
        viz.width = shifted.size;
        viz.height = shifted.size;
        viz.values = shifted.values;
        write_file(dump_pgm, encode_pgm(viz, dump_lo, dump_hi));
    }
    return 0;
}

int run_train(const std::string& manifest_path, const std::string& out_model,
              const std::string& detector, const TrainConfig& cfg, const EnhanceParams& p) {
    const FeatureSource source =
        detector == "pixel" ? FeatureSource::pixel : FeatureSource::spectrum;

    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);
    std::vector<int> labels(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        labels[i] = entries[i].label;

    const std::vector<FeatureVector> features = extract_features(entries, source, p);

    TrainConfig first_epoch = cfg;
    first_epoch.epochs = 1;
    const ClassifierModel after_first = train(features, labels, first_epoch);
    const ClassifierModel model = cfg.epochs == 1 ? after_first : train(features, labels, cfg);
    write_model(out_model, model);

    std::printf("model=%s dim=%zu loss_epoch1=%.6f loss_final=%.6f\n", out_model.c_str(),
                model.dim(), model_loss(after_first, features, labels, cfg.l2),
                model_loss(model, features, labels, cfg.l2));
    return 0;
}

struct Detectors {
    std::optional<ClassifierModel> spectrum;
    std::optional<ClassifierModel> pixel;
    bool ensemble = false;
};

Detectors load_detectors(const std::string& model_path, const std::string& pixel_model_path,
                         bool ensemble) {
    Detectors det;
    det.ensemble = ensemble;
    if (ensemble) {
        if (model_path.empty() || pixel_model_path.empty())
            throw UsageError("--ensemble requires both --model and --pixel-model");
        det.spectrum = read_model(model_path);
        det.pixel = read_model(pixel_model_path);
        if (det.spectrum->source != FeatureSource::spectrum)
            throw Error("--model must be a spectrum model in ensemble mode");
        if (det.pixel->source != FeatureSource::pixel)
            throw Error("--pixel-model must be a pixel model");
    } else {
        if (!pixel_model_path.empty())
            throw UsageError("--pixel-model requires --ensemble");
        if (model_path.empty())
            throw UsageError("--model is required");
        ClassifierModel m = read_model(model_path);
        if (m.source == FeatureSource::pixel)
            det.pixel = std::move(m);
        else
            det.spectrum = std::move(m);
    }
    return det;
}

struct ScoreResult {
    double r_i = 0.0; // pixel detector
    double r_f = 0.0; // spectrum detector
    double r = 0.0;   // final
};

ScoreResult score_image(const Image& img, const Detectors& det, const EnhanceParams& p) {
    ScoreResult s;
    if (det.spectrum)
        s.r_f = score(*det.spectrum, spectrum_feature(img, p));
    if (det.pixel)
        s.r_i = score(*det.pixel, pixel_feature(img));
    if (det.ensemble)
        s.r = combine({s.r_i, s.r_f});
    else
        s.r = det.spectrum ? s.r_f : s.r_i;
    return s;
}

int run_infer(const std::vector<std::string>& files, const Detectors& det,
              const EnhanceParams& p) {
    std::vector<std::string> lines(files.size());
    std::vector<std::string> errors(files.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(files.size()); ++i) {
        try {
            const ScoreResult s = score_image(read_pnm(files[i]), det, p);
            char buf[512];
            if (det.ensemble)
                std::snprintf(buf, sizeof buf, "%s %.6f %.6f %.6f", files[i].c_str(), s.r_i,
                              s.r_f, s.r);
            else
                std::snprintf(buf, sizeof buf, "%s %.6f", files[i].c_str(), s.r);
            lines[i] = buf;
        } catch (const std::exception& e) {
            errors[i] = files[i] + ": " + e.what();
        }
    }

    bool failed = false;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << "error: " << errors[i] << "\n";
            failed = true;
        } else {
            std::cout << lines[i] << "\n";
        }
    }
    return failed ? 1 : 0;
}

int run_eval(const std::string& manifest_path, const Detectors& det, const EnhanceParams& p,
             double th, const std::string& pr_csv) {
    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);

    std::vector<ScoredLabel> scored(entries.size());
    std::vector<std::string> errors(entries.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(entries.size()); ++i) {
        try {
            const ScoreResult s = score_image(read_pnm(entries[i].path), det, p);
            scored[i] = {s.r, entries[i].label};
        } catch (const std::exception& e) {
            errors[i] = entries[i].path + ": " + e.what();
        }
    }
    for (const auto& err : errors)
        if (!err.empty())
            throw Error(err);

    const EvalReport report = evaluate(scored, th);
    std::cout << format_report(report) << "\n";
    std::fprintf(stderr, "precision=%.2f%% recall=%.2f%% f=%.2f%% ap=%.2f%%\n",
                 100.0 * report.precision, 100.0 * report.recall, 100.0 * report.f_score,
                 100.0 * report.ap);
    if (!pr_csv.empty()) {
        const std::string csv = format_pr_csv(report);
        write_file(pr_csv, std::vector<std::uint8_t>(csv.begin(), csv.end()));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CNN-generated image detector based on enhanced frequency spectra"};
    app.name("specdet");
    app.require_subcommand(1);
    // last occurrence wins, so config-file values yield to explicit flags
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::string config_path; // consumed by merge_config_args before parsing

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    synth->add_option("--config", config_path, "key=value config file (flags override)");
    SynthConfig synth_cfg;
    synth_cfg.count_real = 100;
    synth_cfg.count_fake = 100;
    std::string synth_out;
    int kernel_size = 3;
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--real", synth_cfg.count_real, "Number of real-class images")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth->add_option("--fake", synth_cfg.count_fake, "Number of fake-class images")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "Dataset seed")->capture_default_str();
    synth->add_option("--size", synth_cfg.image_size, "Image side length")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--factor", synth_cfg.upsample_factor, "Zero-insertion upsample factor")
        ->check(CLI::Range(2, 64))
        ->capture_default_str();
    synth->add_option("--octaves", synth_cfg.noise_octaves, "Value-noise octaves")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--kernel-size", kernel_size, "Box kernel side (odd)")
        ->check(OddKernel)
        ->capture_default_str();

    // enhance
    auto* enhance = app.add_subcommand("enhance", "Write the enhanced spectrum of one image");
    enhance->add_option("--config", config_path, "key=value config file (flags override)");
    EnhanceParams enhance_params;
    std::string enhance_in, enhance_out, enhance_dump;
    double dump_lo = 0.0, dump_hi = 0.0;
    add_enhance_params(enhance, enhance_params);
    enhance->add_option("--in", enhance_in, "Input PGM/PPM image")->required();
    enhance->add_option("--out", enhance_out, "Output .esp path")->required();
    enhance->add_option("--dump", enhance_dump, "Optional center-shifted PGM visualization");
    auto* lo_opt = enhance->add_option("--lo", dump_lo, "Dump: value mapped to black");
    auto* hi_opt = enhance->add_option("--hi", dump_hi, "Dump: value mapped to white");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a detector from a manifest");
    train_cmd->add_option("--config", config_path, "key=value config file (flags override)");
    EnhanceParams train_params;
    TrainConfig train_cfg;
    std::string train_manifest, train_out, train_detector = "spectrum";
    add_enhance_params(train_cmd, train_params);
    train_cmd->add_option("--manifest", train_manifest, "Labeled manifest CSV")->required();
    train_cmd->add_option("--out", train_out, "Output model path")->required();
    train_cmd->add_option("--detector", train_detector, "Feature source")
        ->check(CLI::IsMember({"spectrum", "pixel"}))
        ->capture_default_str();
    train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--epochs", train_cfg.epochs, "Training epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--batch", train_cfg.batch_size, "Mini-batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_option("--l2", train_cfg.l2, "L2 penalty on weights")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    // infer
    auto* infer = app.add_subcommand("infer", "Score images");
    infer->add_option("--config", config_path, "key=value config file (flags override)");
    EnhanceParams infer_params;
    std::string infer_model, infer_pixel_model;
    bool infer_ensemble = false;
    std::vector<std::string> infer_files;
    add_enhance_params(infer, infer_params);
    infer->add_option("--model", infer_model, "Detector model (CLF1)");
    infer->add_option("--pixel-model", infer_pixel_model, "Pixel-domain model for --ensemble");
    infer->add_flag("--ensemble", infer_ensemble, "Combine spectrum and pixel scores");
    infer->add_option("images", infer_files, "Images to score")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a detector on a labeled manifest");
    eval_cmd->add_option("--config", config_path, "key=value config file (flags override)");
    EnhanceParams eval_params;
    std::string eval_manifest, eval_model, eval_pixel_model, eval_pr;
    bool eval_ensemble = false;
    double eval_th = 0.5;
    add_enhance_params(eval_cmd, eval_params);
    eval_cmd->add_option("--manifest", eval_manifest, "Labeled manifest CSV")->required();
    eval_cmd->add_option("--model", eval_model, "Detector model (CLF1)");
    eval_cmd->add_option("--pixel-model", eval_pixel_model, "Pixel-domain model for --ensemble");
    eval_cmd->add_flag("--ensemble", eval_ensemble, "Combine spectrum and pixel scores");
    eval_cmd->add_option("--th", eval_th, "Decision threshold")->capture_default_str();
    eval_cmd->add_option("--pr", eval_pr, "Write PR-curve CSV here");

    int rc = 0;
    synth->callback([&] {
        synth_cfg.kernel = Kernel::box(kernel_size);
        rc = run_synth(synth_cfg, synth_out);
    });
    enhance->callback([&] {
        std::optional<double> lo, hi;
        if (lo_opt->count())
            lo = dump_lo;
        if (hi_opt->count())
            hi = dump_hi;
        rc = run_enhance(enhance_in, enhance_out, enhance_dump, lo, hi, enhance_params);
    });
    train_cmd->callback([&] {
        train_cfg.seed = train_params.seed;
        rc = run_train(train_manifest, train_out, train_detector, train_cfg, train_params);
    });
    infer->callback([&] {
        rc = run_infer(infer_files,
                       load_detectors(infer_model, infer_pixel_model, infer_ensemble),
                       infer_params);
    });
    eval_cmd->callback([&] {
        rc = run_eval(eval_manifest,
                      load_detectors(eval_model, eval_pixel_model, eval_ensemble), eval_params,
                      eval_th, eval_pr);
    });

    try {
        std::vector<std::string> args = merge_config_args(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
