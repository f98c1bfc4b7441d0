#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "unistitch/image.hpp"

namespace unistitch {

/// PNG (lossless) and 8-bit JPEG by extension. Alpha is dropped; gray
/// stays single-channel; color is RGB. Errors: UnsupportedFormat,
/// CorruptFile, Io.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageBuffer& img);

std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);

/// 8-bit grayscale dumps: masks as 0/255, weights as round(255 w).
ImageBuffer mask_image(const BinaryMask& m);
ImageBuffer weight_image(const WeightMask& w);
void write_mask(const std::filesystem::path& path, const BinaryMask& m);
void write_weights(const std::filesystem::path& path, const WeightMask& w);

bool is_supported_image(const std::filesystem::path& path);

/// First file in `dir` whose stem is `stem` and whose extension is a
/// supported image type, in lexical order.
std::filesystem::path find_image(const std::filesystem::path& dir, const std::string& stem);

}  // namespace unistitch
