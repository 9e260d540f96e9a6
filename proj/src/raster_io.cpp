#include "pmv/raster_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pmv/error.hpp"
#include "pmv/quantize.hpp"

namespace pmv {

namespace {

bool has_png_signature(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    unsigned char sig[8] = {};
    if (!in.read(reinterpret_cast<char*>(sig), 8)) return false;
    return png_sig_cmp(sig, 0, 8) == 0;
}

struct PnmHeader {
    int kind = 0;  // 5 or 6
    int width = 0;
    int height = 0;
    std::streamoff data_offset = 0;
};

bool read_pnm_header(std::ifstream& in, PnmHeader& h) {
    char p = 0, k = 0;
    if (!in.get(p) || !in.get(k) || p != 'P' || (k != '5' && k != '6')) return false;
    h.kind = k - '0';
    int values[3];
    for (int& v : values) {
        int c = in.get();
        while (c != EOF) {
            if (c == '#') {
                while (c != EOF && c != '\n') c = in.get();
            } else if (!std::isspace(c)) {
                break;
            }
            c = in.get();
        }
        if (c == EOF || !std::isdigit(c)) return false;
        v = 0;
        while (c != EOF && std::isdigit(c)) {
            v = v * 10 + (c - '0');
            if (v > (1 << 24)) return false;
            c = in.get();
        }
        // exactly one whitespace byte separates maxval from the raster
    }
    h.width = values[0];
    h.height = values[1];
    if (values[2] != 255 || h.width <= 0 || h.height <= 0) return false;
    h.data_offset = in.tellg();
    return true;
}

Image read_pnm(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    PnmHeader h;
    if (!in || !read_pnm_header(in, h)) throw Error(ErrorCode::corrupt_file, file.string());
    const int src_channels = h.kind == 6 ? 3 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(h.width) * h.height * src_channels);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        throw Error(ErrorCode::corrupt_file, file.string() + ": truncated raster");
    Image out(h.width, h.height, 3);
    for (std::size_t i = 0, n = static_cast<std::size_t>(h.width) * h.height; i < n; ++i)
        for (int c = 0; c < 3; ++c)
            out.pixels[i * 3 + c] = dequantize_u8(raw[i * src_channels + (src_channels == 3 ? c : 0)]);
    return out;
}

Image read_png(const std::filesystem::path& file) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, file.c_str()))
        throw Error(ErrorCode::corrupt_file, file.string() + ": " + img.message);
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> raw(PNG_IMAGE_SIZE(img));
    png_color black{0, 0, 0};
    if (!png_image_finish_read(&img, &black, raw.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw Error(ErrorCode::corrupt_file, file.string() + ": " + msg);
    }
    Image out(static_cast<int>(img.width), static_cast<int>(img.height), 3);
    for (std::size_t i = 0; i < raw.size(); ++i) out.pixels[i] = dequantize_u8(raw[i]);
    return out;
}

}  // namespace

bool probe_raster(const std::filesystem::path& file) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(file, ec)) return false;
    if (has_png_signature(file)) {
        png_image img;
        std::memset(&img, 0, sizeof img);
        img.version = PNG_IMAGE_VERSION;
        const bool ok = png_image_begin_read_from_file(&img, file.c_str()) != 0;
        png_image_free(&img);
        return ok && img.width > 0 && img.height > 0;
    }
    std::ifstream in(file, std::ios::binary);
    PnmHeader h;
    if (!in || !read_pnm_header(in, h)) return false;
    const auto need = static_cast<std::uintmax_t>(h.width) * h.height * (h.kind == 6 ? 3 : 1);
    return std::filesystem::file_size(file, ec) >= static_cast<std::uintmax_t>(h.data_offset) + need;
}

Image read_raster(const std::filesystem::path& file) {
    if (has_png_signature(file)) return read_png(file);
    return read_pnm(file);
}

void write_png(const std::filesystem::path& file, const Image& image) {
    validate(image);
    std::vector<unsigned char> raw(image.pixels.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = quantize_u8(image.pixels[i]);
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width);
    img.height = static_cast<png_uint_32>(image.height);
    img.format = image.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, file.c_str(), 0, raw.data(), 0, nullptr))
        throw Error(ErrorCode::io, file.string() + ": " + img.message);
}

}  // namespace pmv
