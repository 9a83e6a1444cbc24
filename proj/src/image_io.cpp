#include "osmofuse/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <png.h>

#include "osmofuse/kernels.hpp"

namespace osmofuse {

namespace {

struct RawImage {
    int width = 0, height = 0, channels = 0;
    std::vector<double> samples; // interleaved, already mapped to [0,255]
};

// ---- PNG ------------------------------------------------------------------

RawImage read_png_file(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open '" + path + "' for reading");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng initialisation failed");
    }
    // declared ahead of setjmp so the error path unwinds them normally
    std::vector<unsigned char> buf;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("failed to decode PNG '" + path + "'");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_set_expand(png);               // palette -> rgb, gray < 8 bit -> 8 bit
    png_set_strip_alpha(png);          // the model has no use for coverage
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png); // to host little-endian
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int chans = static_cast<int>(png_get_channels(png, info));
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    buf.resize(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = buf.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    if (chans != 1 && chans != 3)
        throw IoError("unsupported PNG channel layout in '" + path + "'");

    RawImage out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = chans;
    out.samples.resize(static_cast<std::size_t>(w) * h * chans);
    if (depth == 8) {
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] = static_cast<double>(buf[i]);
    } else if (depth == 16) {
        const auto* v16 = reinterpret_cast<const unsigned short*>(buf.data());
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] = static_cast<double>(v16[i]) * (255.0 / 65535.0);
    } else {
        throw IoError("unsupported PNG bit depth in '" + path + "'");
    }
    return out;
}

// ---- PNM ------------------------------------------------------------------

int pnm_next_token(std::ifstream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return 0;
    do {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    } while (ch != EOF && !std::isspace(ch));
    return 1;
}

RawImage read_pnm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string tok;
    if (!pnm_next_token(in, tok)) throw IoError("truncated PNM header in '" + path + "'");
    const std::string magic = tok;
    const bool ascii = magic == "P2" || magic == "P3";
    const bool binary = magic == "P5" || magic == "P6";
    if (!ascii && !binary) throw IoError("unsupported PNM magic '" + magic + "' in '" + path + "'");
    const int chans = (magic == "P3" || magic == "P6") ? 3 : 1;

    long vals[3];
    for (int i = 0; i < 3; ++i) {
        if (!pnm_next_token(in, tok)) throw IoError("truncated PNM header in '" + path + "'");
        try {
            vals[i] = std::stol(tok);
        } catch (const std::exception&) {
            throw IoError("malformed PNM header token '" + tok + "' in '" + path + "'");
        }
    }
    const long w = vals[0], h = vals[1], maxval = vals[2];
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw IoError("PNM header out of range in '" + path + "'");

    RawImage out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = chans;
    const std::size_t count = static_cast<std::size_t>(w) * h * chans;
    out.samples.resize(count);
    const double scale = 255.0 / static_cast<double>(maxval);

    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            if (!pnm_next_token(in, tok)) throw IoError("truncated PNM data in '" + path + "'");
            long v = std::stol(tok);
            if (v < 0 || v > maxval) throw IoError("PNM sample out of range in '" + path + "'");
            out.samples[i] = static_cast<double>(v) * scale;
        }
    } else {
        // exactly one whitespace byte separates the header from the data;
        // pnm_next_token already consumed it
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(count * bytes);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw IoError("truncated PNM data in '" + path + "'");
        if (bytes == 1) {
            for (std::size_t i = 0; i < count; ++i)
                out.samples[i] = static_cast<double>(buf[i]) * scale;
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                unsigned v = (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1];
                out.samples[i] = static_cast<double>(v) * scale;
            }
        }
    }
    return out;
}

RawImage read_any(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open '" + path + "' for reading");
    unsigned char magic[8] = {0};
    probe.read(reinterpret_cast<char*>(magic), 8);
    probe.close();
    if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G')
        return read_png_file(path);
    if (magic[0] == 'P' && magic[1] >= '2' && magic[1] <= '6') return read_pnm_file(path);
    throw IoError("unsupported image format in '" + path + "' (expected PNG, PPM or PGM)");
}

} // namespace

Image load_image(const std::string& path, double offset) {
    if (!(offset > 0.0)) throw std::invalid_argument("load_image: offset must be > 0");
    RawImage raw = read_any(path);
    if (raw.height < 2 || raw.width < 2)
        throw IoError("image '" + path + "' is smaller than 2x2");
    Image img(raw.channels, raw.height, raw.width);
    const std::size_t npix = static_cast<std::size_t>(raw.height) * raw.width;
    for (int c = 0; c < raw.channels; ++c) {
        double* dst = img.channel(c).data();
        for (std::size_t i = 0; i < npix; ++i) dst[i] = raw.samples[i * raw.channels + c];
        kernels::clamp(dst, offset, 255.0, npix);
    }
    return img;
}

AlphaMap load_alpha(const std::string& path) {
    RawImage raw = read_any(path);
    if (raw.channels != 1)
        throw IoError("alpha map '" + path + "' must be single channel, got " +
                      std::to_string(raw.channels));
    if (raw.height < 2 || raw.width < 2)
        throw IoError("alpha map '" + path + "' is smaller than 2x2");
    AlphaMap alpha(raw.height, raw.width);
    double* dst = alpha.data();
    for (std::size_t i = 0; i < alpha.size(); ++i) dst[i] = raw.samples[i] / 255.0;
    kernels::clamp(dst, 0.0, 1.0, alpha.size());
    return alpha;
}

void write_png(const std::string& path, const Image& img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw std::invalid_argument("write_png: image must have 1 or 3 channels");
    const int h = img.height(), w = img.width();
    const int chans = img.channels();

    std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w * chans);
    for (int c = 0; c < chans; ++c) {
        const double* src = img.channel(c).data();
        for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) {
            double v = src[i];
            v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
            buf[i * chans + c] = static_cast<unsigned char>(std::floor(v + 0.5));
        }
    }

    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int r = 0; r < h; ++r)
        rows[static_cast<std::size_t>(r)] = buf.data() + static_cast<std::size_t>(r) * w * chans;

    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open '" + path + "' for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("failed to encode PNG '" + path + "'");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 chans == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

namespace {

// symmetric reflection (edge repeated), folded until in range
int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

} // namespace

AlphaMap blur_alpha(const AlphaMap& alpha, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("blur_alpha: sigma must be >= 0");
    if (sigma == 0.0) return alpha;

    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = w;
        total += w;
    }
    for (double& w : kernel) w /= total;

    const int h = alpha.height(), w = alpha.width();
    AlphaMap horiz(h, w), out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int kk = -radius; kk <= radius; ++kk)
                s += kernel[static_cast<std::size_t>(kk + radius)] *
                     alpha.at(r, reflect_index(c + kk, w));
            horiz.at(r, c) = s;
        }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double s = 0.0;
            for (int kk = -radius; kk <= radius; ++kk)
                s += kernel[static_cast<std::size_t>(kk + radius)] *
                     horiz.at(reflect_index(r + kk, h), c);
            out.at(r, c) = s;
        }
    kernels::clamp(out.data(), 0.0, 1.0, out.size());
    return out;
}

} // namespace osmofuse
