#pragma once

#include <array>
#include <cstdint>

#include "geometry.hpp"
#include "tensor.hpp"

namespace simx {

struct ConvStageSpec {
  int kernel_size = 5;
  int in_channels = 0;
  int out_channels = 0;
  float weight_mean = 0.0f;
  float weight_std = 0.0f;
  float activation_slope = 0.01f;
};

struct PoolStageSpec {
  int window = 5;
  int stride = 1;  // 1 or 2
};

// The fixed three-stage architecture: (conv 5x5 same, leaky ReLU, maxpool 5x5
// same) x3 with 16/32/64 filters and pool strides 2/1/2, then a 1x1
// ten-channel projection with leaky ReLU. Weight statistics follow the
// per-layer progression (0.001, 0.01), (0.002, 0.02), (0.003, 0.03),
// (0.004, 0.04).
struct NetworkSpec {
  std::array<ConvStageSpec, 3> conv;
  std::array<PoolStageSpec, 3> pool;
  int output_channels = 10;
  float output_weight_mean = 0.004f;
  float output_weight_std = 0.04f;
  uint64_t seed = 0;

  static NetworkSpec standard(uint64_t seed);
};

// Kernel weights laid out [ky][kx][in][out], contiguous in the output channel.
struct ConvKernel {
  int kernel_size = 5;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<float> weights;  // kernel_size^2 * in * out
  std::vector<float> bias;     // out

  const float* tap(int ky, int kx) const {
    return weights.data() +
           (static_cast<size_t>(ky) * kernel_size + kx) * in_channels *
               out_channels;
  }
};

struct WeightSet {
  std::array<ConvKernel, 3> conv;
  std::vector<float> output_weights;  // 1x1: [in=64][out=10]
  std::vector<float> output_bias;     // 10
};

WeightSet init_weights(const NetworkSpec& spec);

// 5x5 "same" convolution, stride 1, zero-fill borders.
Tensor3 conv2d(const Tensor3& input, const ConvKernel& kernel);

Tensor3 leaky_relu(const Tensor3& input, float slope);

// Window-5 "same" max pooling; output cell i is centered on input index
// i*stride, out-of-bounds positions are excluded from the max. Output dims
// are ceil(in / stride).
Tensor3 maxpool(const Tensor3& input, int window, int stride);

// Full forward pass; returns the encoding (32x32x10 for 128x128x3 input).
Tensor3 forward(const WeightSet& weights, const NetworkSpec& spec,
                const Tensor3& image);

// Forward pass that keeps every activation, so composites that differ from
// this image in one rectangle can be re-encoded by recomputing only the
// affected regions (unchanged cells are read back instead of recomputed).
struct ForwardTrace {
  Tensor3 input;                    // normalized image
  std::array<Tensor3, 3> conv_out;  // per-stage post-activation conv maps
  std::array<Tensor3, 3> pool_out;  // per-stage pooled activations
  Tensor3 encoding;
};

ForwardTrace forward_trace(const WeightSet& weights, const NetworkSpec& spec,
                           const Tensor3& image);

// Scratch buffers reused across encode_composite calls (one per thread).
struct EncodeWorkspace {
  Tensor3 stage_in;
  std::array<Tensor3, 3> conv_out;
  std::array<Tensor3, 3> pool_out;
  Tensor3 encoding;
};

// Per-stage rectangles of cells whose receptive field lies entirely inside
// the patch (zero padding counts as patch-independent). Those cells take the
// same values for every base image, so one candidate's computation can donate
// them to all others.
struct CompositeShare {
  std::array<Rect, 3> pure_conv;  // conv-output coordinates per stage
  std::array<Rect, 3> pure_pool;  // pooled coordinates per stage
};

CompositeShare composite_share(const NetworkSpec& spec, int height, int width,
                               int patch_h, int patch_w, int py, int px);

// Encoding of (base image with `patch` written at pixel (py, px)). Recomputes
// only cells whose receptive field touches the patch; every recomputed value
// is bit-identical to what a full forward pass would produce. When `donor`
// holds another candidate's workspace for the same patch and placement, cells
// inside `share`'s pure rectangles are copied from it instead of recomputed.
Tensor3 encode_composite(const WeightSet& weights, const NetworkSpec& spec,
                         const ForwardTrace& base, const Tensor3& patch,
                         int py, int px, EncodeWorkspace& ws,
                         const EncodeWorkspace* donor = nullptr,
                         const CompositeShare* share = nullptr);

namespace detail {
// Region-limited primitives; `out` must already have the stage's output
// shape. Exposed for tests.
void conv2d_region(const Tensor3& input, const ConvKernel& kernel,
                   const Rect& out_rect, Tensor3& out);
void leaky_relu_region(Tensor3& t, const Rect& rect, float slope);
void maxpool_region(const Tensor3& input, int stride, const Rect& out_rect,
                    Tensor3& out);
}  // namespace detail

}  // namespace simx
