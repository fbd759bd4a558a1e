#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radar_odom {

struct Gray8Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  const std::uint8_t* row(std::size_t r) const { return pixels.data() + r * width; }
};

/// Decodes any PNG to 8-bit grayscale. Throws MalformedFile.
Gray8Image decode_png_gray8(std::span<const std::byte> bytes);
std::vector<std::byte> encode_png_gray8(const Gray8Image& image);

}  // namespace radar_odom
