#pragma once

#include <algorithm>

namespace simx {

// Half-open rectangle over tensor rows/columns.
struct Rect {
  int y0 = 0;
  int x0 = 0;
  int y1 = 0;
  int x1 = 0;

  bool empty() const { return y1 <= y0 || x1 <= x0; }
  int rows() const { return y1 - y0; }
  int cols() const { return x1 - x0; }

  static Rect full(int h, int w) { return {0, 0, h, w}; }

  Rect dilated(int r, int h, int w) const {
    return {std::max(0, y0 - r), std::max(0, x0 - r), std::min(h, y1 + r),
            std::min(w, x1 + r)};
  }

  Rect intersect(const Rect& o) const {
    Rect r{std::max(y0, o.y0), std::max(x0, o.x0), std::min(y1, o.y1),
           std::min(x1, o.x1)};
    if (r.empty()) return {0, 0, 0, 0};
    return r;
  }
};

// r with the (possibly overlapping) rect q removed, as up to four disjoint
// strips appended to `out`.
template <typename Sink>
inline void rect_subtract(const Rect& r, const Rect& q, Sink&& out) {
  Rect cut = r.intersect(q);
  if (cut.empty()) {
    if (!r.empty()) out(r);
    return;
  }
  if (cut.y0 > r.y0) out(Rect{r.y0, r.x0, cut.y0, r.x1});          // top
  if (cut.y1 < r.y1) out(Rect{cut.y1, r.x0, r.y1, r.x1});          // bottom
  if (cut.x0 > r.x0) out(Rect{cut.y0, r.x0, cut.y1, cut.x0});      // left
  if (cut.x1 < r.x1) out(Rect{cut.y0, cut.x1, cut.y1, r.x1});      // right
}

// Output cells of a window-5 "same" pooling stage whose window touches the
// given input rect. Output cell i is centered on input index i*stride and
// covers [i*stride - 2, i*stride + 2].
inline Rect pool_affected(const Rect& in, int stride, int out_h, int out_w) {
  auto ceil_div = [&](int a) {
    return a >= 0 ? (a + stride - 1) / stride : -((-a) / stride);
  };
  Rect out;
  out.y0 = std::max(0, ceil_div(in.y0 - 2));
  out.x0 = std::max(0, ceil_div(in.x0 - 2));
  out.y1 = std::min(out_h, (in.y1 - 1 + 2) / stride + 1);
  out.x1 = std::min(out_w, (in.x1 - 1 + 2) / stride + 1);
  return out;
}

// Input cells needed to evaluate the given pooling output rect.
inline Rect pool_window_union(const Rect& out, int stride, int in_h, int in_w) {
  Rect in;
  in.y0 = std::max(0, out.y0 * stride - 2);
  in.x0 = std::max(0, out.x0 * stride - 2);
  in.y1 = std::min(in_h, (out.y1 - 1) * stride + 2 + 1);
  in.x1 = std::min(in_w, (out.x1 - 1) * stride + 2 + 1);
  return in;
}

}  // namespace simx
