#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tensor.hpp"

namespace simx {

// Decoded 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* px(int x, int y) {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  const uint8_t* px(int x, int y) const {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * 3;
  }

  bool operator==(const RgbImage&) const = default;
};

enum class SliceMode { quad, grid16 };

constexpr int piece_count(SliceMode m) { return m == SliceMode::quad ? 4 : 16; }
constexpr int piece_edge(SliceMode m) { return m == SliceMode::quad ? 64 : 32; }
constexpr int grid_side(SliceMode m) { return m == SliceMode::quad ? 2 : 4; }

// PNG or JPEG, sniffed from the file's magic bytes. Alpha is dropped,
// grayscale expands to three equal channels.
RgbImage load_image(const std::filesystem::path& path);

void save_png(const RgbImage& img, const std::filesystem::path& path);

// Bilinear with half-pixel centers and edge clamping; identity dims return
// the input bit-exactly.
RgbImage resize(const RgbImage& img, int out_w, int out_h);

RgbImage crop(const RgbImage& img, int x, int y, int w, int h);

// Pieces in row-major order from the upper-left; source must be 128x128.
std::vector<RgbImage> slice(const RgbImage& img, SliceMode mode);

// Reassemble pieces with the patch substituted at replace_index.
RgbImage compose(const std::vector<RgbImage>& pieces, int replace_index,
                 const RgbImage& patch);

// H x W x 3 tensor with values channel/255.
Tensor3 to_tensor(const RgbImage& img);

}  // namespace simx
