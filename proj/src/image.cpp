#include "image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include "error.hpp"

namespace simx {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

RgbImage load_png_file(FILE* f, const std::filesystem::path& path) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Status::internal, "libpng init failed");
  }
  RgbImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Status::decode, "failed to decode PNG: " + path.string());
  }
  png_init_io(png, f);
  png_read_info(png, info);

  // Normalize every variant to 8-bit RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);
  rows.resize(img.height);
  for (int y = 0; y < img.height; ++y) rows[y] = img.px(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

struct JpegErrorMgr {
  jpeg_error_mgr base;
  jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  longjmp(reinterpret_cast<JpegErrorMgr*>(cinfo->err)->jump, 1);
}

RgbImage load_jpeg_file(FILE* f, const std::filesystem::path& path) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(Status::decode, "failed to decode JPEG: " + path.string());
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  RgbImage img;
  img.width = static_cast<int>(cinfo.output_width);
  img.height = static_cast<int>(cinfo.output_height);
  img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.px(0, static_cast<int>(cinfo.output_scanline));
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw Error(Status::decode, "cannot open image: " + path.string());
  unsigned char magic[4] = {0};
  size_t n = std::fread(magic, 1, sizeof(magic), f.get());
  std::rewind(f.get());
  if (n >= 4 && magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' &&
      magic[3] == 'G')
    return load_png_file(f.get(), path);
  if (n >= 3 && magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF)
    return load_jpeg_file(f.get(), path);
  throw Error(Status::decode, "unsupported image format: " + path.string());
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw Error(Status::io, "cannot open for writing: " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(Status::internal, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Status::io, "failed to write PNG: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.px(0, y)));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RgbImage resize(const RgbImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1)
    throw Error(Status::invalid_argument, "resize: output dims must be >= 1");
  if (out_w == img.width && out_h == img.height) return img;

  RgbImage out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int ya = std::clamp(y0, 0, img.height - 1);
    int yb = std::clamp(y0 + 1, 0, img.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int xa = std::clamp(x0, 0, img.width - 1);
      int xb = std::clamp(x0 + 1, 0, img.width - 1);
      const uint8_t* p00 = img.px(xa, ya);
      const uint8_t* p10 = img.px(xb, ya);
      const uint8_t* p01 = img.px(xa, yb);
      const uint8_t* p11 = img.px(xb, yb);
      uint8_t* op = out.px(x, y);
      for (int c = 0; c < 3; ++c) {
        double v = (1 - wy) * ((1 - wx) * p00[c] + wx * p10[c]) +
                   wy * ((1 - wx) * p01[c] + wx * p11[c]);
        op[c] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

RgbImage crop(const RgbImage& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width ||
      y + h > img.height)
    throw Error(Status::geometry, "crop out of bounds");
  RgbImage out(w, h);
  for (int row = 0; row < h; ++row)
    std::memcpy(out.px(0, row), img.px(x, y + row), static_cast<size_t>(w) * 3);
  return out;
}

std::vector<RgbImage> slice(const RgbImage& img, SliceMode mode) {
  if (img.width != 128 || img.height != 128)
    throw Error(Status::geometry,
                "slice: source must be 128x128, got " +
                    std::to_string(img.width) + "x" +
                    std::to_string(img.height));
  const int side = grid_side(mode);
  const int edge = piece_edge(mode);
  std::vector<RgbImage> pieces;
  pieces.reserve(static_cast<size_t>(side) * side);
  for (int gy = 0; gy < side; ++gy)
    for (int gx = 0; gx < side; ++gx)
      pieces.push_back(crop(img, gx * edge, gy * edge, edge, edge));
  return pieces;
}

RgbImage compose(const std::vector<RgbImage>& pieces, int replace_index,
                 const RgbImage& patch) {
  const int count = static_cast<int>(pieces.size());
  if (count != 4 && count != 16)
    throw Error(Status::geometry, "compose: expected 4 or 16 pieces");
  if (replace_index < 0 || replace_index >= count)
    throw Error(Status::geometry, "compose: replace index out of range");
  const SliceMode mode = count == 4 ? SliceMode::quad : SliceMode::grid16;
  const int side = grid_side(mode);
  const int edge = piece_edge(mode);
  for (const RgbImage& p : pieces)
    if (p.width != edge || p.height != edge)
      throw Error(Status::geometry, "compose: piece dimension mismatch");
  if (patch.width != edge || patch.height != edge)
    throw Error(Status::geometry, "compose: patch dimension mismatch");

  RgbImage out(128, 128);
  for (int i = 0; i < count; ++i) {
    const RgbImage& src = i == replace_index ? patch : pieces[i];
    int ox = (i % side) * edge;
    int oy = (i / side) * edge;
    for (int row = 0; row < edge; ++row)
      std::memcpy(out.px(ox, oy + row), src.px(0, row),
                  static_cast<size_t>(edge) * 3);
  }
  return out;
}

Tensor3 to_tensor(const RgbImage& img) {
  Tensor3 t(img.height, img.width, 3);
  const size_t n = img.pixels.size();
  for (size_t i = 0; i < n; ++i)
    t.data[i] = static_cast<float>(img.pixels[i]) / 255.0f;
  return t;
}

}  // namespace simx
