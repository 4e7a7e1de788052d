// Copyright 2026 The wbaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wbaug/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <system_error>
#include <vector>

#include "wbaug/error.hpp"

namespace wbaug {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  fail(ErrorKind::Io, path.string() + ": " + what);
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// ---------------------------------------------------------------------------
// PNG. The setjmp-guarded helpers below hold only trivially destructible
// locals so a longjmp out of libpng never skips a destructor.

struct PngHeader {
  png_uint_32 width;
  png_uint_32 height;
  int bit_depth;
  std::size_t rowbytes;
};

void png_warning_sink(png_structp, png_const_charp) {}

bool png_read_header(png_structp png, png_infop info, std::FILE* fp,
                     PngHeader* out) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);
  out->width = png_get_image_width(png, info);
  out->height = png_get_image_height(png, info);
  out->bit_depth = depth;
  out->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool png_read_pixels(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

bool png_write_pixels(png_structp png, png_infop info, std::FILE* fp,
                      png_uint_32 width, png_uint_32 height, int depth,
                      png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, depth, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, info);
  return true;
}

LoadedImage read_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) io_fail(path, "cannot open for reading");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    io_fail(path, "not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, png_warning_sink);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    io_fail(path, "libpng initialization failed");
  }
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  png_set_sig_bytes(png, 8);

  PngHeader hdr{};
  if (!png_read_header(png, info, fp.get(), &hdr))
    io_fail(path, "corrupt PNG header");
  if (hdr.width == 0 || hdr.height == 0) io_fail(path, "empty image");
  if (hdr.rowbytes != static_cast<std::size_t>(hdr.width) * 3 * (hdr.bit_depth / 8))
    io_fail(path, "unexpected PNG row layout");

  std::vector<png_byte> raw(hdr.rowbytes * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 y = 0; y < hdr.height; ++y) rows[y] = raw.data() + y * hdr.rowbytes;
  if (!png_read_pixels(png, info, rows.data()))
    io_fail(path, "truncated or corrupt PNG data");

  const std::size_t count = static_cast<std::size_t>(hdr.width) * hdr.height * 3;
  std::vector<float> data(count);
  if (hdr.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i)
      data[i] = static_cast<float>((raw[2 * i] << 8 | raw[2 * i + 1]) / 65535.0);
  } else {
    for (std::size_t i = 0; i < count; ++i)
      data[i] = static_cast<float>(raw[i] / 255.0);
  }
  return {ImageBuffer(hdr.width, hdr.height, std::move(data)),
          hdr.bit_depth == 16 ? 16 : 8};
}

void write_png(const fs::path& path, const ImageBuffer& img, int depth) {
  const std::size_t bytes = depth == 16 ? 2 : 1;
  const std::size_t rowbytes = img.width() * 3 * bytes;
  std::vector<png_byte> raw(rowbytes * img.height());
  const auto src = img.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const std::uint16_t q = quantize(src[i], depth);
    if (depth == 16) {
      raw[2 * i] = static_cast<png_byte>(q >> 8);
      raw[2 * i + 1] = static_cast<png_byte>(q & 0xff);
    } else {
      raw[i] = static_cast<png_byte>(q);
    }
  }
  std::vector<png_bytep> rows(img.height());
  for (std::size_t y = 0; y < img.height(); ++y) rows[y] = raw.data() + y * rowbytes;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) io_fail(path, "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, png_warning_sink);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    io_fail(path, "libpng initialization failed");
  }
  const bool ok = png_write_pixels(png, info, fp.get(),
                                   static_cast<png_uint_32>(img.width()),
                                   static_cast<png_uint_32>(img.height()),
                                   depth == 16 ? 16 : 8, rows.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) io_fail(path, "PNG encoding failed");
  if (std::fflush(fp.get()) != 0) io_fail(path, "write failed");
}

// ---------------------------------------------------------------------------
// Binary PNM

LoadedImage read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  std::size_t pos = 0;

  const auto next_token = [&]() -> std::string {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  const auto next_number = [&]() -> unsigned long {
    const std::string tok = next_token();
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                    [](unsigned char c) { return std::isdigit(c); }))
      io_fail(path, "malformed PNM header");
    return std::stoul(tok);
  };

  const std::string magic = next_token();
  if (magic != "P6" && magic != "P5") io_fail(path, "unsupported PNM type (need P5 or P6)");
  const unsigned long width = next_number();
  const unsigned long height = next_number();
  const unsigned long maxval = next_number();
  if (width == 0 || height == 0) io_fail(path, "empty image");
  if (maxval == 0 || maxval > 65535) io_fail(path, "invalid PNM maxval");
  ++pos;  // single whitespace after maxval

  const std::size_t channels = magic == "P6" ? 3 : 1;
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t samples = static_cast<std::size_t>(width) * height * channels;
  if (pos > bytes.size() || bytes.size() - pos < samples * sample_bytes)
    io_fail(path, "truncated PNM data");

  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  std::vector<float> data(static_cast<std::size_t>(width) * height * 3);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < samples; ++i) {
    const unsigned v = sample_bytes == 2 ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
    if (v > maxval) io_fail(path, "sample exceeds maxval");
    const auto f = static_cast<float>(v / scale);
    if (channels == 3) {
      data[i] = f;
    } else {
      data[3 * i] = data[3 * i + 1] = data[3 * i + 2] = f;
    }
  }
  return {ImageBuffer(width, height, std::move(data)), sample_bytes == 2 ? 16 : 8};
}

void write_ppm(const fs::path& path, const ImageBuffer& img, int depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P6\n" << img.width() << ' ' << img.height() << '\n'
      << (depth == 16 ? 65535 : 255) << '\n';
  std::string raw;
  raw.reserve(img.data().size() * (depth == 16 ? 2 : 1));
  for (float v : img.data()) {
    const std::uint16_t q = quantize(v, depth);
    if (depth == 16) raw.push_back(static_cast<char>(q >> 8));
    raw.push_back(static_cast<char>(q & 0xff));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) io_fail(path, "write failed");
}

}  // namespace

std::uint16_t quantize(float v, int bit_depth) {
  const double max = bit_depth == 16 ? 65535.0 : 255.0;
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::floor(c * max + 0.5));
}

LoadedImage read_image(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm" || ext == ".pnm" || ext == ".pgm") return read_pnm(path);
  io_fail(path, "unsupported image extension '" + ext + "'");
}

void write_image(const fs::path& path, const ImageBuffer& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    fail(ErrorKind::InvalidInput, "write_image: bit depth must be 8 or 16");
  if (img.empty()) fail(ErrorKind::InvalidInput, "write_image: empty image");
  const std::string ext = lower_extension(path);
  if (ext != ".png" && ext != ".ppm" && ext != ".pnm")
    io_fail(path, "unsupported output extension '" + ext + "'");

  fs::path tmp = path;
  tmp += ".tmp";
  if (ext == ".png") {
    write_png(tmp, img, bit_depth);
  } else {
    write_ppm(tmp, img, bit_depth);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    io_fail(path, "cannot move temporary file into place");
  }
}

}  // namespace wbaug
