#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include <png.h>

#include "frosting/io.hpp"

namespace frosting {

Image read_png(const std::filesystem::path& path) {
    png_image pimg;
    std::memset(&pimg, 0, sizeof pimg);
    pimg.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pimg, path.string().c_str()))
        fail(Err::IoFailure, path.string() + ": " + pimg.message);
    pimg.format = PNG_FORMAT_RGB;
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(pimg));
    if (!png_image_finish_read(&pimg, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = pimg.message;
        png_image_free(&pimg);
        fail(Err::IoFailure, path.string() + ": " + msg);
    }
    Image img(int(pimg.width), int(pimg.height));
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = buf[i] / 255.0;
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.width < 1 || img.height < 1) fail(Err::SizeMismatch, "empty image");
    std::vector<uint8_t> buf(img.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        double v = std::clamp(img.data[i], 0.0, 1.0) * 255.0;
        buf[i] = uint8_t(std::rint(v));  // ties round to even
    }
    png_image pimg;
    std::memset(&pimg, 0, sizeof pimg);
    pimg.version = PNG_IMAGE_VERSION;
    pimg.width = png_uint_32(img.width);
    pimg.height = png_uint_32(img.height);
    pimg.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&pimg, path.string().c_str(), 0, buf.data(), 0, nullptr))
        fail(Err::IoFailure, path.string() + ": " + pimg.message);
}

}  // namespace frosting
