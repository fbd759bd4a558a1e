#include "radar_odom/png_io.hpp"

#include <cstring>
#include <memory>

#include <png.h>

#include "radar_odom/errors.hpp"

namespace radar_odom {
namespace {

// The simplified libpng API reports errors through the struct instead of
// longjmp, so no C++ frames are skipped.
struct ImageGuard {
  png_image* image;
  ~ImageGuard() { png_image_free(image); }
};

}  // namespace

Gray8Image decode_png_gray8(std::span<const std::byte> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  ImageGuard guard{&image};

  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw MalformedFile(std::string("png: ") + image.message, 0);
  }
  image.format = PNG_FORMAT_GRAY;
  // Oxford scans are 3779 x 400; refuse anything absurd before allocating.
  if (image.width == 0 || image.height == 0 ||
      static_cast<std::uint64_t>(image.width) * image.height > (std::uint64_t{1} << 28)) {
    throw MalformedFile("png: unsupported dimensions", 16);
  }

  Gray8Image out;
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    throw MalformedFile(std::string("png: ") + image.message, 0);
  }
  return out;
}

std::vector<std::byte> encode_png_gray8(const Gray8Image& image) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_GRAY;
  ImageGuard guard{&png};

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(std::string("png encode: ") + png.message);
  }
  std::vector<std::byte> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(std::string("png encode: ") + png.message);
  }
  out.resize(size);
  return out;
}

}  // namespace radar_odom
