#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "emp/image.hpp"

namespace emp::image {

/// Reads an 8-bit RGB (or grayscale/palette, expanded to RGB) PNG.
/// Throws ParseError for images with an alpha channel or 16-bit samples.
ImageTensor read_png(const std::filesystem::path& path);
ImageTensor decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const ImageTensor& img);

/// Atomic write of an 8-bit RGB PNG.
void write_png(const std::filesystem::path& path, const ImageTensor& img);

}  // namespace emp::image
