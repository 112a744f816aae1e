#include "sei/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "sei/error.hpp"
#include "sei/ops.hpp"

namespace sei {

namespace {

std::string lower_ext(const std::filesystem::path& p) {
    auto e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    if (text) *text = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

Tensor<double> load_png(const std::filesystem::path& path) {
    auto file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError(path.string() + ": not a PNG file");
    }
    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn,
                                             png_warning_fn);
    if (!png) throw IoError("libpng: cannot allocate read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: cannot allocate info struct");
    }
    std::vector<unsigned char> buffer;
    std::vector<png_bytep> rows_ptr;
    png_uint_32 width = 0, height = 0;
    int depth = 0, channels = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    if (depth == 16) png_set_swap(png);  // host little-endian words
    png_read_update_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    const auto rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * height);
    rows_ptr.resize(height);
    for (png_uint_32 i = 0; i < height; ++i) rows_ptr[i] = buffer.data() + i * rowbytes;
    png_read_image(png, rows_ptr.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (depth != 8 && depth != 16) throw IoError(path.string() + ": unsupported bit depth");
    if (channels != 1 && channels != 3) throw IoError(path.string() + ": unsupported channel layout");
    const double maxval = depth == 16 ? 65535.0 : 255.0;
    const std::size_t c = channels, h = height, w = width;
    std::vector<double> v(c * h * w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                const std::size_t idx = j * c + k;
                unsigned code;
                if (depth == 16) {
                    std::uint16_t word;
                    std::memcpy(&word, rows_ptr[i] + 2 * idx, 2);
                    code = word;
                } else {
                    code = rows_ptr[i][idx];
                }
                v[(k * h + i) * w + j] = code / maxval;
            }
        }
    }
    return Tensor<double>({c, h, w}, std::move(v));
}

unsigned quantize(double v, unsigned maxval) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned>(std::lround(clamped * maxval));
}

void save_png(const Tensor<double>& image, const std::filesystem::path& path, int bit_depth) {
    const auto d = image_dims(image);
    const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
    const std::size_t bpc = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> buffer(d.rows * d.cols * d.channels * bpc);
    for (std::size_t i = 0; i < d.rows; ++i) {
        for (std::size_t j = 0; j < d.cols; ++j) {
            for (std::size_t k = 0; k < d.channels; ++k) {
                const unsigned code = quantize(image[(k * d.rows + i) * d.cols + j], maxval);
                const std::size_t at = ((i * d.cols + j) * d.channels + k) * bpc;
                if (bpc == 2) {
                    buffer[at] = static_cast<unsigned char>(code >> 8);
                    buffer[at + 1] = static_cast<unsigned char>(code & 0xff);
                } else {
                    buffer[at] = static_cast<unsigned char>(code);
                }
            }
        }
    }
    auto file = open_file(path, "wb");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn,
                                              png_warning_fn);
    if (!png) throw IoError("libpng: cannot allocate write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: cannot allocate info struct");
    }
    std::vector<png_bytep> rows_ptr(d.rows);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(d.cols), static_cast<png_uint_32>(d.rows),
                 bit_depth, d.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = d.cols * d.channels * bpc;
    for (std::size_t i = 0; i < d.rows; ++i) rows_ptr[i] = buffer.data() + i * rowbytes;
    png_write_image(png, rows_ptr.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Reads the next header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

Tensor<double> load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const auto magic = pnm_token(in);
    std::size_t c;
    if (magic == "P5") {
        c = 1;
    } else if (magic == "P6") {
        c = 3;
    } else {
        throw IoError(path.string() + ": unsupported PNM variant '" + magic + "'");
    }
    std::size_t w = 0, h = 0;
    unsigned long maxval = 0;
    try {
        w = std::stoul(pnm_token(in));
        h = std::stoul(pnm_token(in));
        maxval = std::stoul(pnm_token(in));  // consumes the single whitespace byte
    } catch (const std::exception&) {
        throw IoError(path.string() + ": malformed PNM header");
    }
    if (maxval == 0 || maxval > 65535) throw IoError(path.string() + ": unsupported maxval");
    const std::size_t bpc = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(w * h * c * bpc);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw IoError(path.string() + ": truncated pixel data");
    }
    std::vector<double> v(c * h * w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            for (std::size_t k = 0; k < c; ++k) {
                const std::size_t at = ((i * w + j) * c + k) * bpc;
                const unsigned code = bpc == 2 ? (unsigned(raw[at]) << 8) | raw[at + 1] : raw[at];
                v[(k * h + i) * w + j] = code / static_cast<double>(maxval);
            }
        }
    }
    return Tensor<double>({c, h, w}, std::move(v));
}

void save_pnm(const Tensor<double>& image, const std::filesystem::path& path, int bit_depth) {
    const auto d = image_dims(image);
    const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
    const std::size_t bpc = bit_depth == 16 ? 2 : 1;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << (d.channels == 3 ? "P6" : "P5") << '\n' << d.cols << ' ' << d.rows << '\n' << maxval << '\n';
    std::vector<unsigned char> raw(d.rows * d.cols * d.channels * bpc);
    for (std::size_t i = 0; i < d.rows; ++i) {
        for (std::size_t j = 0; j < d.cols; ++j) {
            for (std::size_t k = 0; k < d.channels; ++k) {
                const unsigned code = quantize(image[(k * d.rows + i) * d.cols + j], maxval);
                const std::size_t at = ((i * d.cols + j) * d.channels + k) * bpc;
                if (bpc == 2) {
                    raw[at] = static_cast<unsigned char>(code >> 8);
                    raw[at + 1] = static_cast<unsigned char>(code & 0xff);
                } else {
                    raw[at] = static_cast<unsigned char>(code);
                }
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

bool is_image_path(const std::filesystem::path& path) {
    const auto e = lower_ext(path);
    return e == ".png" || e == ".pgm" || e == ".ppm" || e == ".pnm";
}

Tensor<double> load_image(const std::filesystem::path& path) {
    const auto e = lower_ext(path);
    if (e == ".png") return load_png(path);
    if (e == ".pgm" || e == ".ppm" || e == ".pnm") return load_pnm(path);
    throw IoError(path.string() + ": unsupported image format");
}

void save_image(const Tensor<double>& image, const std::filesystem::path& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) {
        throw ValidationError("save_image: bit depth must be 8 or 16");
    }
    const auto d = image_dims(image);
    if (d.channels != 1 && d.channels != 3) {
        throw DimensionError("save_image: need 1 or 3 channels, got " + std::to_string(d.channels));
    }
    const auto e = lower_ext(path);
    if (e != ".png" && e != ".pgm" && e != ".ppm" && e != ".pnm") {
        throw IoError(path.string() + ": unsupported image format");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (e == ".png") return save_png(image, path, bit_depth);
    if (e == ".pgm" || e == ".ppm" || e == ".pnm") {
        if ((e == ".pgm" && d.channels != 1) || (e == ".ppm" && d.channels != 3)) {
            throw ValidationError("save_image: channel count does not match " + e);
        }
        return save_pnm(image, path, bit_depth);
    }
    throw IoError(path.string() + ": unsupported image format");
}

}  // namespace sei
