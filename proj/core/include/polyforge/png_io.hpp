#pragma once

#include <string>

#include "polyforge/raster.hpp"

namespace polyforge {

/// 8-bit grayscale PNG, foreground = 255, background = 0.
/// Reads map any nonzero sample to 1. Throws std::runtime_error on I/O
/// or format problems (a 16-bit file is rejected).
BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const BinaryMask& mask, const std::string& path);

/// 16-bit grayscale PNG, sample = round(65535 * value). The quantized
/// values round-trip bit-exactly.
Heatmap read_heatmap_png(const std::string& path);
void write_heatmap_png(const Heatmap& heatmap, const std::string& path);

/// Bit depth of a grayscale PNG (8 or 16) without decoding the image.
int png_bit_depth(const std::string& path);

}  // namespace polyforge
