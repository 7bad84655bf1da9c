#include "emp/png_io.hpp"

#include <png.h>

#include <string>
#include <string_view>

#include "emp/errors.hpp"
#include "emp/io.hpp"

namespace emp::image {
namespace {

// RAII for png_image: png_image_free is required after any failed or partial read.
class PngImage {
public:
    PngImage() {
        image_ = {};
        image_.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image_); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;

    png_image* get() { return &image_; }
    png_image* operator->() { return &image_; }

    std::string message() const { return image_.message; }

private:
    png_image image_;
};

}  // namespace

ImageTensor decode_png(std::span<const std::uint8_t> bytes) {
    PngImage png;
    if (!png_image_begin_read_from_memory(png.get(), bytes.data(), bytes.size())) {
        throw ParseError("cannot decode PNG: " + png.message());
    }
    if (png->format & PNG_FORMAT_FLAG_ALPHA) throw ParseError("PNG has an alpha channel; only RGB is supported");
    if (png->format & PNG_FORMAT_FLAG_LINEAR) throw ParseError("16-bit PNG samples are not supported");
    png->format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> interleaved(PNG_IMAGE_SIZE(*png.get()));
    if (!png_image_finish_read(png.get(), nullptr, interleaved.data(), 0, nullptr)) {
        throw ParseError("cannot decode PNG: " + png.message());
    }
    ImageTensor img;
    img.width = png->width;
    img.height = png->height;
    for (auto& p : img.planes) p.resize(img.pixel_count());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        for (std::size_t c = 0; c < kChannels; ++c) img.planes[c][i] = interleaved[i * kChannels + c];
    }
    return img;
}

ImageTensor read_png(const std::filesystem::path& path) {
    const std::string bytes = io::read_file(path);
    return decode_png({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
}

std::vector<std::uint8_t> encode_png(const ImageTensor& img) {
    img.validate();
    std::vector<std::uint8_t> interleaved(img.pixel_count() * kChannels);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        for (std::size_t c = 0; c < kChannels; ++c) interleaved[i * kChannels + c] = img.planes[c][i];
    }
    PngImage png;
    png->width = static_cast<png_uint_32>(img.width);
    png->height = static_cast<png_uint_32>(img.height);
    png->format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(png.get(), nullptr, &size, 0, interleaved.data(), 0, nullptr)) {
        throw Error("cannot size PNG: " + png.message());
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(png.get(), out.data(), &size, 0, interleaved.data(), 0, nullptr)) {
        throw Error("cannot encode PNG: " + png.message());
    }
    out.resize(size);
    return out;
}

void write_png(const std::filesystem::path& path, const ImageTensor& img) {
    const auto bytes = encode_png(img);
    io::write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace emp::image
