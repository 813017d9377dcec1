#include "vbm3d/video_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "vbm3d/errors.hpp"

namespace vbm3d {

namespace {

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<float> samples;
};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------- patterns

void validate_pattern(const std::string& pattern) {
    int conversions = 0;
    for (std::size_t i = 0; i < pattern.size(); i++) {
        if (pattern[i] != '%') continue;
        std::size_t j = i + 1;
        if (j < pattern.size() && pattern[j] == '%') {  // literal percent
            i = j;
            continue;
        }
        while (j < pattern.size() && std::strchr("-+ 0#", pattern[j])) j++;
        while (j < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[j]))) j++;
        if (j >= pattern.size() || !std::strchr("diu", pattern[j]))
            throw ConfigError("pattern '" + pattern + "': only one integer conversion (%d/%i/%u) is supported");
        conversions++;
        i = j;
    }
    if (conversions != 1)
        throw ConfigError("pattern '" + pattern + "' must contain exactly one integer conversion");
}

}  // namespace

std::string format_index(const std::string& pattern, int index) {
    validate_pattern(pattern);
    const int n = std::snprintf(nullptr, 0, pattern.c_str(), index);
    if (n < 0) throw ConfigError("pattern '" + pattern + "' failed to format");
    std::string out(static_cast<std::size_t>(n) + 1, '\0');
    std::snprintf(out.data(), out.size(), pattern.c_str(), index);
    out.resize(static_cast<std::size_t>(n));
    return out;
}

namespace {

// -------------------------------------------------------------------- PNG

Frame load_png(std::FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> buf;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path + ": corrupt PNG");
    }
    png_init_io(png, f);
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray_fixed(png, 1 /*silent*/, -1, -1);  // default luma weights
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    buf.resize(stride * h);
    rows.resize(h);
    for (int y = 0; y < h; y++) rows[y] = buf.data() + stride * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Frame fr;
    fr.width = w;
    fr.height = h;
    fr.samples.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; y++) {
        const png_byte* row = buf.data() + stride * y;
        for (int x = 0; x < w; x++) {
            if (depth == 16)  // PNG stores 16-bit samples big-endian
                fr.samples[static_cast<std::size_t>(y) * w + x] =
                    static_cast<float>((row[2 * x] << 8) | row[2 * x + 1]);
            else
                fr.samples[static_cast<std::size_t>(y) * w + x] = static_cast<float>(row[x]);
        }
    }
    return fr;
}

void save_png(const Frame& fr, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(path + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_byte> buf(static_cast<std::size_t>(fr.width) * fr.height);
    std::vector<png_bytep> rows(fr.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path + ": PNG write failed");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, fr.width, fr.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    for (std::size_t i = 0; i < buf.size(); i++) {
        const float s = std::round(fr.samples[i]);
        buf[i] = static_cast<png_byte>(s < 0.f ? 0 : (s > 255.f ? 255 : s));
    }
    for (int y = 0; y < fr.height; y++) rows[y] = buf.data() + static_cast<std::size_t>(y) * fr.width;
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
}

// -------------------------------------------------------------------- PGM

// Reads one whitespace/comment-separated token from a netpbm header.
std::string pnm_token(std::FILE* f, const std::string& path) {
    std::string tok;
    int c;
    while ((c = std::fgetc(f)) != EOF) {
        if (c == '#') {  // comment runs to end of line
            while ((c = std::fgetc(f)) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw FormatError(path + ": truncated header");
    return tok;
}

int pnm_int(std::FILE* f, const std::string& path) {
    const std::string tok = pnm_token(f, path);
    try {
        return std::stoi(tok);
    } catch (...) {
        throw FormatError(path + ": bad header field '" + tok + "'");
    }
}

Frame load_pgm(std::FILE* f, const std::string& path) {
    if (pnm_token(f, path) != "P5") throw FormatError(path + ": not a binary PGM");
    Frame fr;
    fr.width = pnm_int(f, path);
    fr.height = pnm_int(f, path);
    const int maxval = pnm_int(f, path);
    if (fr.width < 1 || fr.height < 1 || maxval < 1 || maxval > 65535)
        throw FormatError(path + ": bad PGM dimensions");
    const std::size_t count = static_cast<std::size_t>(fr.width) * fr.height;
    fr.samples.resize(count);
    if (maxval > 255) {  // two bytes per sample, big-endian per the PGM spec
        std::vector<std::uint8_t> raw(count * 2);
        if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
            throw FormatError(path + ": truncated raster");
        for (std::size_t i = 0; i < count; i++)
            fr.samples[i] = static_cast<float>((raw[2 * i] << 8) | raw[2 * i + 1]);
    } else {
        std::vector<std::uint8_t> raw(count);
        if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
            throw FormatError(path + ": truncated raster");
        for (std::size_t i = 0; i < count; i++) fr.samples[i] = static_cast<float>(raw[i]);
    }
    return fr;
}

void save_pgm(const Frame& fr, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fprintf(f.get(), "P5\n%d %d\n255\n", fr.width, fr.height);
    std::vector<std::uint8_t> raw(fr.samples.size());
    for (std::size_t i = 0; i < raw.size(); i++) {
        const float s = std::round(fr.samples[i]);
        raw[i] = static_cast<std::uint8_t>(s < 0.f ? 0 : (s > 255.f ? 255 : s));
    }
    if (std::fwrite(raw.data(), 1, raw.size(), f.get()) != raw.size())
        throw IoError(path + ": short write");
}

// -------------------------------------------------------------------- PFM
// Grayscale PFM: "Pf", dimensions, scale (sign gives endianness), then rows
// bottom-to-top as float32. This is the lossless container for estimates.

Frame load_pfm(std::FILE* f, const std::string& path) {
    if (pnm_token(f, path) != "Pf") throw FormatError(path + ": not a grayscale PFM");
    Frame fr;
    fr.width = pnm_int(f, path);
    fr.height = pnm_int(f, path);
    const std::string scale_tok = pnm_token(f, path);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (...) {
        throw FormatError(path + ": bad PFM scale");
    }
    if (fr.width < 1 || fr.height < 1 || scale == 0.0) throw FormatError(path + ": bad PFM header");
    const bool little_endian = scale < 0.0;
    const std::size_t count = static_cast<std::size_t>(fr.width) * fr.height;
    std::vector<std::uint8_t> raw(count * 4);
    if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
        throw FormatError(path + ": truncated raster");
    fr.samples.resize(count);
    for (int y = 0; y < fr.height; y++) {
        const std::uint8_t* row = raw.data() + static_cast<std::size_t>(fr.height - 1 - y) * fr.width * 4;
        for (int x = 0; x < fr.width; x++) {
            std::uint8_t b[4];
            std::memcpy(b, row + 4 * x, 4);
            if (!little_endian) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
            float v;
            std::memcpy(&v, b, 4);
            fr.samples[static_cast<std::size_t>(y) * fr.width + x] = v;
        }
    }
    return fr;
}

void save_pfm(const Frame& fr, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fprintf(f.get(), "Pf\n%d %d\n-1.0\n", fr.width, fr.height);
    for (int y = fr.height - 1; y >= 0; y--) {
        const float* row = fr.samples.data() + static_cast<std::size_t>(y) * fr.width;
        if (std::fwrite(row, 4, fr.width, f.get()) != static_cast<std::size_t>(fr.width))
            throw IoError(path + ": short write");
    }
}

// ------------------------------------------------------------ dispatching

Frame load_frame(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError(path + ": cannot open");
    unsigned char magic[8] = {0};
    const std::size_t got = std::fread(magic, 1, sizeof magic, f.get());
    std::rewind(f.get());
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) return load_png(f.get(), path);
    if (got >= 2 && magic[0] == 'P' && magic[1] == '5') return load_pgm(f.get(), path);
    if (got >= 2 && magic[0] == 'P' && magic[1] == 'f') return load_pfm(f.get(), path);
    throw FormatError(path + ": unsupported image format");
}

std::string lower_extension(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

void save_frame(const Frame& fr, const std::string& path) {
    const std::string ext = lower_extension(path);
    if (ext == "png")
        save_png(fr, path);
    else if (ext == "pgm")
        save_pgm(fr, path);
    else if (ext == "pfm")
        save_pfm(fr, path);
    else
        throw ConfigError(path + ": unsupported output extension (use .png, .pgm or .pfm)");
}

}  // namespace

Video load_sequence(const std::string& pattern, int first, int last) {
    if (last < first) throw ConfigError("load_sequence: last index precedes first");
    Video v;
    for (int idx = first; idx <= last; idx++) {
        const std::string path = format_index(pattern, idx);
        Frame fr;
        try {
            fr = load_frame(path);
        } catch (const IoError&) {
            throw;
        }
        if (idx == first) {
            v = Video(fr.width, fr.height, last - first + 1);
        } else if (fr.width != v.width || fr.height != v.height) {
            throw FormatError(path + ": frame dimensions differ from first frame");
        }
        std::copy(fr.samples.begin(), fr.samples.end(), v.frame(idx - first));
    }
    return v;
}

void save_sequence(const Video& v, const std::string& pattern, int first) {
    for (int t = 0; t < v.frames; t++) {
        Frame fr;
        fr.width = v.width;
        fr.height = v.height;
        fr.samples.assign(v.frame(t), v.frame(t) + v.frame_size());
        save_frame(fr, format_index(pattern, first + t));
    }
}

}  // namespace vbm3d
