#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace holo {

/// Decoded PNG samples, row-major and interleaved, widened to 16 bits.
struct PngImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 0;   // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;

  std::uint16_t at(std::size_t x, std::size_t y, int c) const {
    return samples[(y * width + x) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
  }
};

/// Reads an 8- or 16-bit PNG. Palette images are expanded to RGB; other bit depths throw.
PngImage read_png(const std::string& path);

/// Writes gray (1) or RGB (3) samples at 8 or 16 bits. Output bytes are deterministic.
void write_png(const std::string& path, const PngImage& image);

}  // namespace holo
