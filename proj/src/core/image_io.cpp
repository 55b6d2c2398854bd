#include "core/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <vector>

#include "core/error.hpp"

namespace sdgf {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) fail_io("cannot open '" + path + "'");
    return f;
}

void swap_floats(float* data, size_t count) {
    auto* bytes = reinterpret_cast<unsigned char*>(data);
    for (size_t i = 0; i < count; ++i) {
        std::swap(bytes[4 * i + 0], bytes[4 * i + 3]);
        std::swap(bytes[4 * i + 1], bytes[4 * i + 2]);
    }
}

constexpr bool host_little_endian() { return std::endian::native == std::endian::little; }

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::FILE* f, const std::string& path) {
    std::string tok;
    int c;
    while ((c = std::fgetc(f)) != EOF) {
        if (c == '#') {
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
    if (tok.empty()) fail_io("'" + path + "': truncated PFM header");
    return tok;
}

}  // namespace

void write_pfm(const std::string& path, const ImageGrid& grid) {
    if (grid.empty()) fail_invalid("write_pfm: empty grid");
    FilePtr f = open_file(path, "wb");
    const int h = grid.height(), w = grid.width(), c = grid.channels();
    if (c == 3) {
        std::fprintf(f.get(), "PF\n%d %d\n", w, h);
    } else if (c == 1) {
        std::fprintf(f.get(), "Pf\n%d %d\n", w, h);
    } else {
        std::fprintf(f.get(), "Pf\n%d %d %d\n", w, h, c);
    }
    std::fprintf(f.get(), "%f\n", host_little_endian() ? -1.0 : 1.0);

    std::vector<float> row(static_cast<size_t>(w) * (c == 3 ? 3 : 1));
    if (c == 1 || c == 3) {
        for (int y = h - 1; y >= 0; --y) {  // bottom-up
            for (int x = 0; x < w; ++x)
                for (int ch = 0; ch < c; ++ch) row[static_cast<size_t>(x) * c + ch] = grid.at(x, y, ch);
            if (std::fwrite(row.data(), sizeof(float), row.size(), f.get()) != row.size())
                fail_io("'" + path + "': short write");
        }
    } else {
        for (int plane = 0; plane < c; ++plane) {
            for (int y = h - 1; y >= 0; --y) {
                for (int x = 0; x < w; ++x) row[x] = grid.at(x, y, plane);
                if (std::fwrite(row.data(), sizeof(float), static_cast<size_t>(w), f.get()) !=
                    static_cast<size_t>(w))
                    fail_io("'" + path + "': short write");
            }
        }
    }
}

ImageGrid read_pfm(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    const std::string magic = next_token(f.get(), path);
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        fail_io("'" + path + "': not a PFM file (magic '" + magic + "')");

    const std::string ws = next_token(f.get(), path);
    const std::string hs = next_token(f.get(), path);
    int w = 0, h = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
    } catch (const std::exception&) {
        fail_io("'" + path + "': bad PFM dimensions");
    }
    if (w < 1 || h < 1) fail_io("'" + path + "': bad PFM dimensions");

    // Optional plane count before the scale (stack extension). The scale is
    // the first token that parses as a non-integer or negative value.
    std::string tok = next_token(f.get(), path);
    double scale;
    if (magic == "Pf" && tok.find_first_of(".eE-") == std::string::npos) {
        channels = std::stoi(tok);
        if (channels < 1) fail_io("'" + path + "': bad PFM plane count");
        tok = next_token(f.get(), path);
    }
    try {
        scale = std::stod(tok);
    } catch (const std::exception&) {
        fail_io("'" + path + "': bad PFM scale");
    }
    if (scale == 0.0) fail_io("'" + path + "': zero PFM scale");
    const bool file_little = scale < 0.0;

    ImageGrid grid(h, w, channels);
    std::vector<float> row(static_cast<size_t>(w) * (channels == 3 ? 3 : 1));
    auto read_row = [&](size_t n) {
        if (std::fread(row.data(), sizeof(float), n, f.get()) != n)
            fail_io("'" + path + "': truncated PFM data");
        if (file_little != host_little_endian()) swap_floats(row.data(), n);
    };
    if (channels == 1 || channels == 3) {
        for (int y = h - 1; y >= 0; --y) {
            read_row(row.size());
            for (int x = 0; x < w; ++x)
                for (int ch = 0; ch < channels; ++ch)
                    grid.at(x, y, ch) = row[static_cast<size_t>(x) * channels + ch];
        }
    } else {
        for (int plane = 0; plane < channels; ++plane)
            for (int y = h - 1; y >= 0; --y) {
                read_row(static_cast<size_t>(w));
                for (int x = 0; x < w; ++x) grid.at(x, y, plane) = row[x];
            }
    }
    const double mag = std::abs(scale);
    if (mag != 1.0)
        for (float& v : grid.data()) v = static_cast<float>(v * mag);
    return grid;
}

namespace {

struct PngRead {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngRead() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWrite {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWrite() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Decodes any gray/RGB PNG to 16-bit rows, host byte order.
void read_png_16(const std::string& path, int& width, int& height, int& channels,
                 std::vector<uint16_t>& pixels) {
    FilePtr f = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8))
        fail_io("'" + path + "': not a PNG file");

    PngRead ctx;
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) fail_io("libpng: read struct allocation failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) fail_io("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(ctx.png))) fail_io("'" + path + "': PNG decode error");

    png_init_io(ctx.png, f.get());
    png_set_sig_bytes(ctx.png, 8);
    png_read_info(ctx.png, ctx.info);

    width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color = png_get_color_type(ctx.png, ctx.info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
    png_set_strip_alpha(ctx.png);
    if (bit_depth < 16) png_set_expand_16(ctx.png);
    if (host_little_endian()) png_set_swap(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    channels = png_get_channels(ctx.png, ctx.info);
    if (channels != 1 && channels != 3) fail_io("'" + path + "': unsupported PNG channel count");

    pixels.resize(static_cast<size_t>(width) * height * channels);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(pixels.data() + static_cast<size_t>(y) * width * channels);
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
}

void write_png_16(const std::string& path, int width, int height, int channels,
                  const std::vector<uint16_t>& pixels) {
    FilePtr f = open_file(path, "wb");
    PngWrite ctx;
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) fail_io("libpng: write struct allocation failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) fail_io("libpng: info struct allocation failed");
    if (setjmp(png_jmpbuf(ctx.png))) fail_io("'" + path + "': PNG encode error");

    png_init_io(ctx.png, f.get());
    png_set_IHDR(ctx.png, ctx.info, width, height, 16,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    if (host_little_endian()) png_set_swap(ctx.png);

    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<uint16_t*>(pixels.data() + static_cast<size_t>(y) * width * channels));
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, nullptr);
}

}  // namespace

void write_depth_png(const std::string& path, const DepthMap& depth) {
    std::vector<uint16_t> pixels(static_cast<size_t>(depth.height) * depth.width, 0);
    for (size_t i = 0; i < pixels.size(); ++i) {
        if (!depth.valid[i]) continue;
        const double v = std::round(static_cast<double>(depth.depth[i]) * 256.0);
        pixels[i] = static_cast<uint16_t>(std::clamp(v, 0.0, 65535.0));
    }
    write_png_16(path, depth.width, depth.height, 1, pixels);
}

DepthMap read_depth_png(const std::string& path) {
    int w, h, c;
    std::vector<uint16_t> pixels;
    read_png_16(path, w, h, c, pixels);
    if (c != 1) fail_io("'" + path + "': depth PNG must be single-channel");
    DepthMap out(h, w);
    for (size_t i = 0; i < pixels.size(); ++i) {
        if (pixels[i] == 0) continue;
        out.depth[i] = static_cast<float>(pixels[i]) / 256.f;
        out.valid[i] = 1;
    }
    return out;
}

void write_image_png(const std::string& path, const ImageGrid& image) {
    const int c = image.channels();
    if (c != 1 && c != 3) fail_invalid("write_image_png: image must have 1 or 3 channels");
    std::vector<uint16_t> pixels(static_cast<size_t>(image.height()) * image.width() * c);
    const std::vector<float>& d = image.data();
    for (size_t i = 0; i < pixels.size(); ++i) {
        const float v = std::clamp(d[i], 0.f, 1.f);
        pixels[i] = static_cast<uint16_t>(std::lround(v * 65535.0));
    }
    write_png_16(path, image.width(), image.height(), c, pixels);
}

ImageGrid read_image_png(const std::string& path) {
    int w, h, c;
    std::vector<uint16_t> pixels;
    read_png_16(path, w, h, c, pixels);
    ImageGrid out(h, w, c);
    std::vector<float>& d = out.data();
    for (size_t i = 0; i < pixels.size(); ++i) d[i] = static_cast<float>(pixels[i]) / 65535.f;
    return out;
}

bool file_exists(const std::string& path) {
    std::error_code ec;
    return std::filesystem::exists(path, ec);
}

}  // namespace sdgf
