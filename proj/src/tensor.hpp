#pragma once

#include <cstddef>
#include <vector>

#include "error.hpp"

namespace simx {

// Dense rank-3 array in row-major (height, width, channel) order. The channel
// index is innermost, so one pixel's channels are contiguous.
struct Tensor3 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Tensor3() = default;
  Tensor3(int h, int w, int c)
      : height(h),
        width(w),
        channels(c),
        data(static_cast<size_t>(h) * w * c, 0.0f) {
    if (h <= 0 || w <= 0 || c <= 0)
      throw Error(Status::invalid_argument, "tensor dims must be positive");
  }

  size_t size() const { return data.size(); }

  float& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  float* row(int y, int x = 0) {
    return data.data() + (static_cast<size_t>(y) * width + x) * channels;
  }
  const float* row(int y, int x = 0) const {
    return data.data() + (static_cast<size_t>(y) * width + x) * channels;
  }

  bool same_shape(const Tensor3& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

}  // namespace simx
