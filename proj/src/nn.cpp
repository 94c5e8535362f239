#include "nn.hpp"

#include <cstring>

#include "rng.hpp"

namespace simx {

NetworkSpec NetworkSpec::standard(uint64_t seed) {
  NetworkSpec s;
  s.conv[0] = {5, 3, 16, 0.001f, 0.01f, 0.01f};
  s.conv[1] = {5, 16, 32, 0.002f, 0.02f, 0.01f};
  s.conv[2] = {5, 32, 64, 0.003f, 0.03f, 0.01f};
  s.pool[0] = {5, 2};
  s.pool[1] = {5, 1};
  s.pool[2] = {5, 2};
  s.output_channels = 10;
  s.output_weight_mean = 0.004f;
  s.output_weight_std = 0.04f;
  s.seed = seed;
  return s;
}

namespace {

// Single-cell convolution with border handling; accumulation order over
// (ky, kx, c) matches the tiled interior path.
template <typename KernelAt>
inline void conv_cell(const Tensor3& in, const KernelAt& ker, int C, int O,
                      const float* bias, int y, int x, float* out) {
  float acc[64];
  for (int o = 0; o < O; ++o) acc[o] = bias[o];
  for (int ky = -2; ky <= 2; ++ky) {
    int yy = y + ky;
    if (yy < 0 || yy >= in.height) continue;
    for (int kx = -2; kx <= 2; ++kx) {
      int xx = x + kx;
      if (xx < 0 || xx >= in.width) continue;
      const float* ip = in.row(yy, xx);
      const float* kp = ker(ky + 2, kx + 2);
      for (int c = 0; c < C; ++c) {
        float v = ip[c];
        const float* kr = kp + static_cast<size_t>(c) * O;
        for (int o = 0; o < O; ++o) acc[o] += v * kr[o];
      }
    }
  }
  std::memcpy(out, acc, sizeof(float) * O);
}

// Interior tile: PX adjacent output pixels per call, accumulators held in
// registers, inner loop vectorized over the output channel. Every path
// accumulates each cell in the same (ky, kx, c) order, so a cell's value is
// bit-identical no matter which tile width computed it.
template <int C, int O>
inline void conv_tile4(const Tensor3& in, const ConvKernel& kernel,
                       const float* bias, int y, int x, Tensor3& out) {
  float acc[4][O];
  for (int p = 0; p < 4; ++p)
    for (int o = 0; o < O; ++o) acc[p][o] = bias[o];
  const float* krow = kernel.weights.data();
  for (int ky = -2; ky <= 2; ++ky) {
    const float* ipr = in.row(y + ky, x - 2);
    for (int kx = 0; kx < 5; ++kx, krow += C * O) {
      const float* ip = ipr + static_cast<size_t>(kx) * C;
      for (int c = 0; c < C; ++c) {
        float v0 = ip[c];
        float v1 = ip[C + c];
        float v2 = ip[2 * C + c];
        float v3 = ip[3 * C + c];
        const float* kr = krow + static_cast<size_t>(c) * O;
#pragma GCC ivdep
        for (int o = 0; o < O; ++o) {
          float kv = kr[o];
          acc[0][o] += v0 * kv;
          acc[1][o] += v1 * kv;
          acc[2][o] += v2 * kv;
          acc[3][o] += v3 * kv;
        }
      }
    }
  }
  for (int p = 0; p < 4; ++p)
    std::memcpy(out.row(y, x + p), acc[p], sizeof(float) * O);
}

template <int C, int O>
inline void conv_tile2(const Tensor3& in, const ConvKernel& kernel,
                       const float* bias, int y, int x, Tensor3& out) {
  float acc[2][O];
  for (int p = 0; p < 2; ++p)
    for (int o = 0; o < O; ++o) acc[p][o] = bias[o];
  const float* krow = kernel.weights.data();
  for (int ky = -2; ky <= 2; ++ky) {
    const float* ipr = in.row(y + ky, x - 2);
    for (int kx = 0; kx < 5; ++kx, krow += C * O) {
      const float* ip = ipr + static_cast<size_t>(kx) * C;
      for (int c = 0; c < C; ++c) {
        float v0 = ip[c];
        float v1 = ip[C + c];
        const float* kr = krow + static_cast<size_t>(c) * O;
#pragma GCC ivdep
        for (int o = 0; o < O; ++o) {
          float kv = kr[o];
          acc[0][o] += v0 * kv;
          acc[1][o] += v1 * kv;
        }
      }
    }
  }
  for (int p = 0; p < 2; ++p)
    std::memcpy(out.row(y, x + p), acc[p], sizeof(float) * O);
}

template <int C, int O>
inline void conv_tile1(const Tensor3& in, const ConvKernel& kernel,
                       const float* bias, int y, int x, Tensor3& out) {
  float acc[O];
  for (int o = 0; o < O; ++o) acc[o] = bias[o];
  const float* krow = kernel.weights.data();
  for (int ky = -2; ky <= 2; ++ky) {
    const float* ipr = in.row(y + ky, x - 2);
    for (int kx = 0; kx < 5; ++kx, krow += C * O) {
      const float* ip = ipr + static_cast<size_t>(kx) * C;
      for (int c = 0; c < C; ++c) {
        float v0 = ip[c];
        const float* kr = krow + static_cast<size_t>(c) * O;
#pragma GCC ivdep
        for (int o = 0; o < O; ++o) acc[o] += v0 * kr[o];
      }
    }
  }
  std::memcpy(out.row(y, x), acc, sizeof(float) * O);
}

template <int C, int O>
void conv_region_fixed(const Tensor3& in, const ConvKernel& kernel,
                       const Rect& r, Tensor3& out) {
  const int H = in.height, W = in.width;
  const float* bias = kernel.bias.data();
  auto ker = [&](int ky, int kx) { return kernel.tap(ky, kx); };

  for (int y = r.y0; y < r.y1; ++y) {
    int x = r.x0;
    if (y < 2 || y >= H - 2) {
      for (; x < r.x1; ++x) conv_cell(in, ker, C, O, bias, y, x, out.row(y, x));
      continue;
    }
    for (; x < std::min(r.x1, 2); ++x)
      conv_cell(in, ker, C, O, bias, y, x, out.row(y, x));
    int inner_end = std::min(r.x1, W - 2);
    for (; x + 4 <= inner_end; x += 4) conv_tile4<C, O>(in, kernel, bias, y, x, out);
    for (; x + 2 <= inner_end; x += 2) conv_tile2<C, O>(in, kernel, bias, y, x, out);
    for (; x < inner_end; ++x) conv_tile1<C, O>(in, kernel, bias, y, x, out);
    for (; x < r.x1; ++x) conv_cell(in, ker, C, O, bias, y, x, out.row(y, x));
  }
}

void conv_region_generic(const Tensor3& in, const ConvKernel& kernel,
                         const Rect& r, Tensor3& out) {
  const int C = kernel.in_channels, O = kernel.out_channels;
  auto ker = [&](int ky, int kx) { return kernel.tap(ky, kx); };
  std::vector<float> acc(O);
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      for (int o = 0; o < O; ++o) acc[o] = kernel.bias[o];
      for (int ky = -2; ky <= 2; ++ky) {
        int yy = y + ky;
        if (yy < 0 || yy >= in.height) continue;
        for (int kx = -2; kx <= 2; ++kx) {
          int xx = x + kx;
          if (xx < 0 || xx >= in.width) continue;
          const float* ip = in.row(yy, xx);
          const float* kp = ker(ky + 2, kx + 2);
          for (int c = 0; c < C; ++c) {
            float v = ip[c];
            const float* kr = kp + static_cast<size_t>(c) * O;
            for (int o = 0; o < O; ++o) acc[o] += v * kr[o];
          }
        }
      }
      std::memcpy(out.row(y, x), acc.data(), sizeof(float) * O);
    }
  }
}

void project_1x1_region(const Tensor3& in, const std::vector<float>& w,
                        const std::vector<float>& bias, const Rect& r,
                        Tensor3& out) {
  const int C = in.channels, O = out.channels;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      const float* ip = in.row(y, x);
      float* op = out.row(y, x);
      float acc[16];
      for (int o = 0; o < O; ++o) acc[o] = bias[o];
      for (int c = 0; c < C; ++c) {
        float v = ip[c];
        const float* kr = w.data() + static_cast<size_t>(c) * O;
        for (int o = 0; o < O; ++o) acc[o] += v * kr[o];
      }
      std::memcpy(op, acc, sizeof(float) * O);
    }
  }
}

int pooled_extent(int n, int stride) { return (n + stride - 1) / stride; }

// Rows of `rect` copied from src into dst (same shape).
void copy_rect(const Tensor3& src, const Rect& rect, Tensor3& dst) {
  if (rect.empty()) return;
  size_t bytes = sizeof(float) * rect.cols() * src.channels;
  for (int y = rect.y0; y < rect.y1; ++y)
    std::memcpy(dst.row(y, rect.x0), src.row(y, rect.x0), bytes);
}

// Cells whose 5x5 "same" conv window over `in` (H x W) reads only rows/cols
// inside `pure_in` or zero padding.
Rect erode_conv(const Rect& pure_in, int H, int W) {
  Rect r{pure_in.y0 == 0 ? 0 : pure_in.y0 + 2,
         pure_in.x0 == 0 ? 0 : pure_in.x0 + 2,
         pure_in.y1 == H ? H : pure_in.y1 - 2,
         pure_in.x1 == W ? W : pure_in.x1 - 2};
  if (r.empty()) return {0, 0, 0, 0};
  return r;
}

// Pool output cells whose window-5 clamped span lies inside `pure_conv`.
Rect erode_pool(const Rect& pure_conv, int stride, int H, int W, int oh,
                int ow) {
  if (pure_conv.empty()) return {0, 0, 0, 0};
  auto lo = [&](int v0) {
    return v0 == 0 ? 0 : (v0 + 2 + stride - 1) / stride;
  };
  auto hi = [&](int v1, int n, int on) {
    return v1 == n ? on : (v1 - 3) / stride + 1;
  };
  Rect r{lo(pure_conv.y0), lo(pure_conv.x0), hi(pure_conv.y1, H, oh),
         hi(pure_conv.x1, W, ow)};
  r.y0 = std::max(0, r.y0);
  r.x0 = std::max(0, r.x0);
  r.y1 = std::min(oh, r.y1);
  r.x1 = std::min(ow, r.x1);
  if (r.empty()) return {0, 0, 0, 0};
  return r;
}

}  // namespace

namespace detail {

void conv2d_region(const Tensor3& input, const ConvKernel& kernel,
                   const Rect& out_rect, Tensor3& out) {
  if (input.channels != kernel.in_channels)
    throw Error(Status::invalid_argument,
                "conv2d: input has " + std::to_string(input.channels) +
                    " channels, kernel expects " +
                    std::to_string(kernel.in_channels));
  if (kernel.kernel_size != 5)
    throw Error(Status::invalid_argument, "conv2d: kernel must be 5x5");
  if (out_rect.empty()) return;
  const int C = kernel.in_channels, O = kernel.out_channels;
  if (C == 3 && O == 16)
    conv_region_fixed<3, 16>(input, kernel, out_rect, out);
  else if (C == 16 && O == 32)
    conv_region_fixed<16, 32>(input, kernel, out_rect, out);
  else if (C == 32 && O == 64)
    conv_region_fixed<32, 64>(input, kernel, out_rect, out);
  else
    conv_region_generic(input, kernel, out_rect, out);
}

void leaky_relu_region(Tensor3& t, const Rect& rect, float slope) {
  const int C = t.channels;
  for (int y = rect.y0; y < rect.y1; ++y) {
    float* p = t.row(y, rect.x0);
    size_t n = static_cast<size_t>(rect.cols()) * C;
    for (size_t i = 0; i < n; ++i) p[i] = p[i] >= 0.0f ? p[i] : slope * p[i];
  }
}

void maxpool_region(const Tensor3& input, int stride, const Rect& out_rect,
                    Tensor3& out) {
  const int C = input.channels;
  for (int oy = out_rect.y0; oy < out_rect.y1; ++oy) {
    int y_lo = std::max(0, oy * stride - 2);
    int y_hi = std::min(input.height - 1, oy * stride + 2);
    for (int ox = out_rect.x0; ox < out_rect.x1; ++ox) {
      int x_lo = std::max(0, ox * stride - 2);
      int x_hi = std::min(input.width - 1, ox * stride + 2);
      float* op = out.row(oy, ox);
      const float* first = input.row(y_lo, x_lo);
      for (int c = 0; c < C; ++c) op[c] = first[c];
      for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
          const float* ip = input.row(y, x);
          for (int c = 0; c < C; ++c) op[c] = std::max(op[c], ip[c]);
        }
      }
    }
  }
}

}  // namespace detail

Tensor3 conv2d(const Tensor3& input, const ConvKernel& kernel) {
  Tensor3 out(input.height, input.width, kernel.out_channels);
  detail::conv2d_region(input, kernel, Rect::full(out.height, out.width), out);
  return out;
}

Tensor3 leaky_relu(const Tensor3& input, float slope) {
  Tensor3 out = input;
  detail::leaky_relu_region(out, Rect::full(out.height, out.width), slope);
  return out;
}

Tensor3 maxpool(const Tensor3& input, int window, int stride) {
  if (window != 5)
    throw Error(Status::invalid_argument, "maxpool: window must be 5");
  if (stride != 1 && stride != 2)
    throw Error(Status::invalid_argument, "maxpool: stride must be 1 or 2");
  Tensor3 out(pooled_extent(input.height, stride),
              pooled_extent(input.width, stride), input.channels);
  detail::maxpool_region(input, stride, Rect::full(out.height, out.width),
                         out);
  return out;
}

ForwardTrace forward_trace(const WeightSet& weights, const NetworkSpec& spec,
                           const Tensor3& image) {
  if (image.channels != spec.conv[0].in_channels)
    throw Error(Status::invalid_argument,
                "forward: expected " +
                    std::to_string(spec.conv[0].in_channels) +
                    "-channel input, got " + std::to_string(image.channels));
  ForwardTrace t;
  t.input = image;
  const Tensor3* cur = &t.input;
  for (int s = 0; s < 3; ++s) {
    t.conv_out[s] = conv2d(*cur, weights.conv[s]);
    Tensor3& c = t.conv_out[s];
    detail::leaky_relu_region(c, Rect::full(c.height, c.width),
                              spec.conv[s].activation_slope);
    t.pool_out[s] = maxpool(c, spec.pool[s].window, spec.pool[s].stride);
    cur = &t.pool_out[s];
  }
  t.encoding =
      Tensor3(cur->height, cur->width, spec.output_channels);
  Rect full = Rect::full(cur->height, cur->width);
  project_1x1_region(*cur, weights.output_weights, weights.output_bias, full,
                     t.encoding);
  detail::leaky_relu_region(t.encoding, full, spec.conv[2].activation_slope);
  return t;
}

Tensor3 forward(const WeightSet& weights, const NetworkSpec& spec,
                const Tensor3& image) {
  return forward_trace(weights, spec, image).encoding;
}

CompositeShare composite_share(const NetworkSpec& spec, int height, int width,
                               int patch_h, int patch_w, int py, int px) {
  CompositeShare sh;
  Rect pure{py, px, py + patch_h, px + patch_w};
  int H = height, W = width;
  for (int s = 0; s < 3; ++s) {
    const int stride = spec.pool[s].stride;
    const int oh = pooled_extent(H, stride), ow = pooled_extent(W, stride);
    sh.pure_conv[s] = erode_conv(pure, H, W);
    sh.pure_pool[s] = erode_pool(sh.pure_conv[s], stride, H, W, oh, ow);
    pure = sh.pure_pool[s];
    H = oh;
    W = ow;
  }
  return sh;
}

Tensor3 encode_composite(const WeightSet& weights, const NetworkSpec& spec,
                         const ForwardTrace& base, const Tensor3& patch,
                         int py, int px, EncodeWorkspace& ws,
                         const EncodeWorkspace* donor,
                         const CompositeShare* share) {
  if (patch.channels != base.input.channels)
    throw Error(Status::invalid_argument, "patch channel mismatch");
  if (py < 0 || px < 0 || py + patch.height > base.input.height ||
      px + patch.width > base.input.width)
    throw Error(Status::geometry, "patch does not fit inside base image");

  Rect dirty{py, px, py + patch.height, px + patch.width};
  // Stage inputs are only read where a conv cell is recomputed, i.e. within
  // four cells of the dirty rectangle, so only that ring is copied from base.
  if (!ws.stage_in.same_shape(base.input))
    ws.stage_in = Tensor3(base.input.height, base.input.width,
                          base.input.channels);
  rect_subtract(dirty.dilated(4, base.input.height, base.input.width), dirty,
                [&](const Rect& r) { copy_rect(base.input, r, ws.stage_in); });
  for (int y = 0; y < patch.height; ++y)
    std::memcpy(ws.stage_in.row(py + y, px), patch.row(y),
                sizeof(float) * patch.width * patch.channels);
  const Tensor3* cur = &ws.stage_in;
  for (int s = 0; s < 3; ++s) {
    const int H = cur->height, W = cur->width;
    const int stride = spec.pool[s].stride;
    const int oh = pooled_extent(H, stride), ow = pooled_extent(W, stride);
    Rect conv_dirty = dirty.dilated(2, H, W);
    Rect pool_dirty = pool_affected(conv_dirty, stride, oh, ow);
    // The dirty pool windows also read a ring of unchanged conv cells; those
    // come from the base trace instead of being recomputed.
    Rect conv_needed = pool_window_union(pool_dirty, stride, H, W);

    Tensor3& conv_out = ws.conv_out[s];
    if (conv_out.height != H || conv_out.width != W ||
        conv_out.channels != spec.conv[s].out_channels)
      conv_out = Tensor3(H, W, spec.conv[s].out_channels);
    rect_subtract(conv_needed, conv_dirty,
                  [&](const Rect& r) { copy_rect(base.conv_out[s], r, conv_out); });

    Rect pure_conv =
        share ? share->pure_conv[s].intersect(conv_dirty) : Rect{0, 0, 0, 0};
    if (donor && !pure_conv.empty()) {
      copy_rect(donor->conv_out[s], pure_conv, conv_out);
      rect_subtract(conv_dirty, pure_conv, [&](const Rect& r) {
        detail::conv2d_region(*cur, weights.conv[s], r, conv_out);
        detail::leaky_relu_region(conv_out, r, spec.conv[s].activation_slope);
      });
    } else {
      detail::conv2d_region(*cur, weights.conv[s], conv_dirty, conv_out);
      detail::leaky_relu_region(conv_out, conv_dirty,
                                spec.conv[s].activation_slope);
    }

    if (!ws.pool_out[s].same_shape(base.pool_out[s]))
      ws.pool_out[s] = Tensor3(oh, ow, spec.conv[s].out_channels);
    // Pooled maps feed the next stage's recomputed conv strips (within four
    // cells of the next dirty rect); the last one feeds the 1x1 projection
    // over the dirty rect only, so it needs no base ring at all.
    if (s < 2)
      rect_subtract(pool_dirty.dilated(4, oh, ow), pool_dirty, [&](const Rect& r) {
        copy_rect(base.pool_out[s], r, ws.pool_out[s]);
      });
    Rect pure_pool =
        share ? share->pure_pool[s].intersect(pool_dirty) : Rect{0, 0, 0, 0};
    if (donor && !pure_pool.empty()) {
      copy_rect(donor->pool_out[s], pure_pool, ws.pool_out[s]);
      rect_subtract(pool_dirty, pure_pool, [&](const Rect& r) {
        detail::maxpool_region(conv_out, stride, r, ws.pool_out[s]);
      });
    } else {
      detail::maxpool_region(conv_out, stride, pool_dirty, ws.pool_out[s]);
    }
    cur = &ws.pool_out[s];
    dirty = pool_dirty;
  }

  ws.encoding = base.encoding;
  Rect pure_enc =
      share ? share->pure_pool[2].intersect(dirty) : Rect{0, 0, 0, 0};
  auto project = [&](const Rect& r) {
    project_1x1_region(*cur, weights.output_weights, weights.output_bias, r,
                       ws.encoding);
    detail::leaky_relu_region(ws.encoding, r, spec.conv[2].activation_slope);
  };
  if (donor && !pure_enc.empty()) {
    copy_rect(donor->encoding, pure_enc, ws.encoding);
    rect_subtract(dirty, pure_enc, project);
  } else {
    project(dirty);
  }
  return ws.encoding;
}

}  // namespace simx
