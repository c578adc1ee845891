#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <set>
#include <vector>

#include "specdet/enhance.hpp"
#include "specdet/synthgen.hpp"

using namespace specdet;
namespace fs = std::filesystem;

namespace {

SynthConfig small_cfg() {
    SynthConfig cfg;
    cfg.image_size = 128;
    cfg.seed = 20250704;
    return cfg;
}

double median_bin(const EnhancedSpectrum& e) {
    std::vector<double> sorted = e.values;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    return sorted[sorted.size() / 2];
}

struct NyquistStats {
    double horizontal;
    double vertical;
    double diagonal;
    double median;
};

NyquistStats nyquist_stats(const EnhancedSpectrum& e) {
    const int half = e.size / 2;
    return {e.at(half, 0), e.at(0, half), e.at(half, half), median_bin(e)};
}

} // namespace

TEST_CASE("generators are deterministic in (seed, index)") {
    const SynthConfig cfg = small_cfg();
    CHECK(gen_real(cfg, 3).pixels == gen_real(cfg, 3).pixels);
    CHECK(gen_fake(cfg, 5).pixels == gen_fake(cfg, 5).pixels);
    CHECK(gen_real(cfg, 0).pixels != gen_real(cfg, 1).pixels);
    CHECK(gen_fake(cfg, 0).pixels != gen_fake(cfg, 1).pixels);
    SynthConfig other = cfg;
    other.seed = cfg.seed + 1;
    CHECK(gen_real(other, 3).pixels != gen_real(cfg, 3).pixels);
}

TEST_CASE("real images use a wide value range") {
    SynthConfig cfg;
    cfg.seed = 11;
    const Image img = gen_real(cfg, 0); // default 256x256
    std::set<std::uint8_t> distinct(img.pixels.begin(), img.pixels.end());
    CHECK(distinct.size() >= 100);
}

TEST_CASE("zero_insert_upsample layout") {
    GrayImage low{2, 2, {1.0, 2.0, 3.0, 4.0}};
    const GrayImage up = zero_insert_upsample(low, 2);
    REQUIRE(up.width == 4);
    REQUIRE(up.height == 4);
    CHECK(up.at(0, 0) == 1.0);
    CHECK(up.at(0, 2) == 2.0);
    CHECK(up.at(2, 0) == 3.0);
    CHECK(up.at(2, 2) == 4.0);
    double sum = 0.0;
    for (double v : up.values)
        sum += v;
    CHECK(sum == 10.0); // inserted samples are exactly zero
}

TEST_CASE("filter2d replicates edges") {
    GrayImage img{3, 1, {3.0, 6.0, 9.0}};
    Kernel k = Kernel::box(3);
    const GrayImage out = filter2d(img, k);
    // column 0 window replicates to {3,3,6} on each of three rows
    CHECK(out.at(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(out.at(0, 1) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(out.at(0, 2) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("fake images spike at the Nyquist bins") {
    const SynthConfig cfg = small_cfg();
    for (int index = 0; index < 3; ++index) {
        const Image img = gen_fake(cfg, index);
        const EnhancedSpectrum e = enhance_image(img, 64, 16, 1);
        const NyquistStats s = nyquist_stats(e);
        CHECK(s.horizontal > s.median);
        CHECK(s.vertical > s.median);
        CHECK(s.diagonal > s.median);
    }
}

TEST_CASE("real images have no Nyquist excess on average") {
    const SynthConfig cfg = small_cfg();
    const int count = 50;
    EnhancedSpectrum mean;
    for (int index = 0; index < count; ++index) {
        const EnhancedSpectrum e = enhance_image(gen_real(cfg, index), 64, 16, 1);
        if (index == 0) {
            mean = e;
        } else {
            for (std::size_t i = 0; i < mean.values.size(); ++i)
                mean.values[i] += e.values[i];
        }
    }
    for (double& v : mean.values)
        v /= count;
    const NyquistStats s = nyquist_stats(mean);
    CHECK(s.horizontal <= 1.5 * s.median);
}

TEST_CASE("fake Nyquist mean exceeds real Nyquist mean per bin") {
    const SynthConfig cfg = small_cfg();
    const int count = 30;
    double fake_sum[3] = {0, 0, 0}, real_sum[3] = {0, 0, 0};
    for (int index = 0; index < count; ++index) {
        const NyquistStats f = nyquist_stats(enhance_image(gen_fake(cfg, index), 64, 16, 1));
        const NyquistStats r = nyquist_stats(enhance_image(gen_real(cfg, index), 64, 16, 1));
        fake_sum[0] += f.horizontal;
        fake_sum[1] += f.vertical;
        fake_sum[2] += f.diagonal;
        real_sum[0] += r.horizontal;
        real_sum[1] += r.vertical;
        real_sum[2] += r.diagonal;
    }
    for (int i = 0; i < 3; ++i)
        CHECK(fake_sum[i] > real_sum[i]);
}

TEST_CASE("a proper lowpass kernel suppresses the Nyquist excess") {
    const SynthConfig box_cfg = small_cfg();

    SynthConfig lp_cfg = box_cfg;
    lp_cfg.kernel = lowpass_kernel(11, box_cfg.upsample_factor);

    double box_excess = 0.0, lp_excess = 0.0;
    const int count = 8;
    for (int index = 0; index < count; ++index) {
        const NyquistStats b = nyquist_stats(enhance_image(gen_fake(box_cfg, index), 64, 16, 1));
        const NyquistStats l = nyquist_stats(enhance_image(gen_fake(lp_cfg, index), 64, 16, 1));
        box_excess += (b.horizontal + b.vertical + b.diagonal) / 3.0 - b.median;
        lp_excess += (l.horizontal + l.vertical + l.diagonal) / 3.0 - l.median;
    }
    CHECK(lp_excess < box_excess);
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.image_size = 255; // not divisible by 2
    CHECK_THROWS_AS(gen_fake(cfg, 0), DomainError);

    SynthConfig even_kernel;
    even_kernel.kernel.size = 4;
    even_kernel.kernel.taps.assign(16, 1.0 / 16.0);
    CHECK_THROWS_AS(gen_fake(even_kernel, 0), DomainError);
}

TEST_CASE("build_dataset writes files, manifest, and is reproducible") {
    SynthConfig cfg = small_cfg();
    cfg.count_real = 2;
    cfg.count_fake = 2;

    const fs::path dir =
        fs::temp_directory_path() / ("specdet_synth_" + std::to_string(::getpid()));
    fs::remove_all(dir);

    const DatasetManifest manifest = build_dataset(cfg, dir);
    REQUIRE(manifest.entries.size() == 4);
    CHECK(manifest.seed == cfg.seed);
    CHECK(manifest.config_digest == config_digest(cfg));

    int labels[2] = {0, 0};
    std::set<std::string> paths;
    for (const auto& entry : manifest.entries) {
        ++labels[entry.label];
        paths.insert(entry.path);
        CHECK(fs::exists(dir / entry.path));
    }
    CHECK(labels[0] == 2);
    CHECK(labels[1] == 2);
    CHECK(paths.size() == 4);

    const auto manifest_bytes = read_file(dir / "manifest.csv");
    const auto sample_bytes = read_file(dir / "fake_00001.pgm");

    build_dataset(cfg, dir); // rebuild in place
    CHECK(read_file(dir / "manifest.csv") == manifest_bytes);
    CHECK(read_file(dir / "fake_00001.pgm") == sample_bytes);

    const auto entries = read_manifest(dir / "manifest.csv");
    REQUIRE(entries.size() == 4);
    for (const auto& entry : entries)
        CHECK(fs::exists(entry.path)); // resolved against the manifest dir

    fs::remove_all(dir);
}

TEST_CASE("read_manifest rejects malformed input") {
    const fs::path dir =
        fs::temp_directory_path() / ("specdet_manifest_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    auto write_text = [&](const fs::path& p, const std::string& text) {
        write_file(p, std::vector<std::uint8_t>(text.begin(), text.end()));
    };

    write_text(dir / "no_header.csv", "a.pgm,0\n");
    CHECK_THROWS_AS(read_manifest(dir / "no_header.csv"), FormatError);

    write_text(dir / "bad_label.csv", "path,label\na.pgm,2\n");
    CHECK_THROWS_AS(read_manifest(dir / "bad_label.csv"), FormatError);

    write_text(dir / "empty.csv", "path,label\n");
    CHECK_THROWS_AS(read_manifest(dir / "empty.csv"), FormatError);

    fs::remove_all(dir);
}
