#include "specdet/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace specdet {

namespace {

struct HeaderCursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    int peek() const { return eof() ? -1 : bytes[pos]; }
    int get() { return eof() ? -1 : bytes[pos++]; }
};

bool is_pnm_space(int c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Skip whitespace and '#' comment lines between header tokens.
void skip_separators(HeaderCursor& cur) {
    while (!cur.eof()) {
        int c = cur.peek();
        if (is_pnm_space(c)) {
            cur.get();
        } else if (c == '#') {
            while (!cur.eof() && cur.get() != '\n') {
            }
        } else {
            break;
        }
    }
}

int parse_header_int(HeaderCursor& cur, const char* what) {
    skip_separators(cur);
    if (cur.eof() || cur.peek() < '0' || cur.peek() > '9')
        throw FormatError(std::string("pnm: expected ") + what + " in header");
    long value = 0;
    while (!cur.eof() && cur.peek() >= '0' && cur.peek() <= '9') {
        value = value * 10 + (cur.get() - '0');
        if (value > 1'000'000'000)
            throw FormatError(std::string("pnm: ") + what + " out of range");
    }
    return static_cast<int>(value);
}

} // namespace

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2)
        throw FormatError("pnm: truncated magic");
    int channels;
    if (bytes[0] == 'P' && bytes[1] == '5')
        channels = 1;
    else if (bytes[0] == 'P' && bytes[1] == '6')
        channels = 3;
    else
        throw FormatError("pnm: bad magic, expected P5 or P6");

    HeaderCursor cur{bytes, 2};
    int width = parse_header_int(cur, "width");
    int height = parse_header_int(cur, "height");
    int maxval = parse_header_int(cur, "maxval");
    if (width < 1 || height < 1)
        throw FormatError("pnm: non-positive dimensions");
    if (maxval != 255)
        throw FormatError("pnm: unsupported maxval (only 255)");

    // Exactly one whitespace byte separates maxval from the raw payload.
    if (cur.eof() || !is_pnm_space(cur.get()))
        throw FormatError("pnm: missing separator before payload");

    std::size_t expected = static_cast<std::size_t>(width) * height * channels;
    if (bytes.size() - cur.pos < expected)
        throw FormatError("pnm: truncated payload");

    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos + expected));
    return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img, double lo, double hi) {
    if (!(hi > lo))
        throw DomainError("encode_pgm: hi must be greater than lo");

    char header[64];
    int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", img.width, img.height);
    std::vector<std::uint8_t> out(header, header + n);
    out.reserve(out.size() + img.values.size());

    const double scale = 255.0 / (hi - lo);
    for (double v : img.values) {
        double t = (v - lo) * scale;
        t = std::clamp(t, 0.0, 255.0);
        out.push_back(static_cast<std::uint8_t>(std::lround(t)));
    }
    return out;
}

GrayImage to_gray(const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw DomainError("to_gray: channels must be 1 or 3");

    GrayImage gray;
    gray.width = img.width;
    gray.height = img.height;
    gray.values.resize(static_cast<std::size_t>(img.width) * img.height);

    const std::size_t n = gray.values.size();
    if (img.channels == 1) {
        for (std::size_t i = 0; i < n; ++i)
            gray.values[i] = static_cast<double>(img.pixels[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t* p = &img.pixels[i * 3];
            gray.values[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    }
    return gray;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height) {
    if (out_width < 1 || out_height < 1)
        throw DimensionError("resize_bilinear: output dimensions must be positive");

    GrayImage out;
    out.width = out_width;
    out.height = out_height;
    out.values.resize(static_cast<std::size_t>(out_width) * out_height);

    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;
    for (int row = 0; row < out_height; ++row) {
        double fy = (row + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = fy - y0;
        for (int col = 0; col < out_width; ++col) {
            double fx = (col + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = fx - x0;
            double top = img.at(y0, x0) * (1.0 - wx) + img.at(y0, x1) * wx;
            double bot = img.at(y1, x0) * (1.0 - wx) + img.at(y1, x1) * wx;
            out.at(row, col) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

} // namespace specdet
