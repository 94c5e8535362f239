#pragma once

#include <filesystem>
#include <string>

#include "image.hpp"

namespace simx::test {

// Deterministic procedural test image: smooth color fields plus a few solid
// rectangles, so distinct seeds give visually distinct images.
RgbImage synth_image(uint64_t seed, int w = 128, int h = 128);

// Writes `count` synthetic PNGs (0000.png ...) into dir, creating it.
void make_corpus(const std::filesystem::path& dir, int count, uint64_t seed);

// 8-bit grayscale PNG filled with one value (tests channel expansion).
void write_gray_png(const std::filesystem::path& path, int w, int h,
                    uint8_t value);

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace simx::test
