#include "gap/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>
#include <jerror.h>

#include "gap/error.hpp"

namespace gap::raster {

RasterImage::RasterImage(int width, int height, int channels, SampleMode mode)
    : RasterImage(width, height, channels,
                  std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                     std::max(height, 0) * std::max(channels, 0)),
                  mode) {}

RasterImage::RasterImage(int width, int height, int channels, std::vector<float> samples,
                         SampleMode mode)
    : width_(width), height_(height), channels_(channels), mode_(mode), samples_(std::move(samples)) {
  if (width < 1 || height < 1) throw ShapeError("image dimensions must be >= 1");
  if (channels != 1 && channels != 3 && channels != 4)
    throw ShapeError("unsupported channel count " + std::to_string(channels));
  if (samples_.size() != static_cast<std::size_t>(width) * height * channels)
    throw ShapeError("sample buffer size does not match width*height*channels");
}

RasterImage RasterImage::converted(SampleMode mode) const {
  if (mode == mode_) return *this;
  RasterImage out = *this;
  out.mode_ = mode;
  for (float& v : out.samples_) {
    v = mode == SampleMode::kInteger ? std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f) : v / 255.0f;
  }
  return out;
}

RasterImage RasterImage::with_channels(int channels) const {
  if (channels == channels_) return *this;
  RasterImage out(width_, height_, channels, mode_);
  const float opaque = full_scale();
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      float rgba[4];
      if (channels_ == 1) {
        rgba[0] = rgba[1] = rgba[2] = at(x, y, 0);
        rgba[3] = opaque;
      } else {
        for (int c = 0; c < 3; ++c) rgba[c] = at(x, y, c);
        rgba[3] = channels_ == 4 ? at(x, y, 3) : opaque;
      }
      if (channels == 1) {
        // Rec. 601 luma.
        out.at(x, y, 0) = 0.299f * rgba[0] + 0.587f * rgba[1] + 0.114f * rgba[2];
      } else {
        for (int c = 0; c < channels; ++c) out.at(x, y, c) = rgba[c];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PNG

namespace {

struct PngReadState {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
  std::string message;
};

void png_read_bytes(png_structp png, png_bytep out, png_size_t count) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (count > st->data.size() - st->offset) {
    st->offset = st->data.size();
    png_error(png, "unexpected end of PNG stream");
  }
  std::copy_n(st->data.data() + st->offset, count, out);
  st->offset += count;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
  if (st != nullptr) st->message = msg;
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  PngReadState st{bytes, 0, {}};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, png_on_error, png_on_warning);
  if (png == nullptr) throw DecodeError("cannot allocate PNG decoder", 0);
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("cannot allocate PNG info", 0);
  }

  // Declared before setjmp so a longjmp never skips their destructors.
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  int width = 0, height = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("malformed PNG: " + st.message, st.offset);
  }

  png_set_read_fn(png, &st, png_read_bytes);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const bool has_trns = png_get_valid(png, info, PNG_INFO_tRNS) != 0;
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (has_trns) png_set_tRNS_to_alpha(png);
  const bool gray = (color_type & PNG_COLOR_MASK_COLOR) == 0 && color_type != PNG_COLOR_TYPE_PALETTE;
  const bool alpha = (color_type & PNG_COLOR_MASK_ALPHA) != 0 || has_trns;
  if (gray && alpha) png_set_gray_to_rgb(png);  // gray+alpha becomes RGBA
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  buffer.resize(row_bytes * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<float> samples(buffer.begin(), buffer.end());
  return RasterImage(width, height, channels, std::move(samples), SampleMode::kInteger);
}

void png_write_bytes(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void png_flush(png_structp) {}

// ---------------------------------------------------------------------------
// JPEG

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_on_message(j_common_ptr cinfo, int level) {
  // A truncated stream only raises a warning in libjpeg; promote it to an error.
  if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) jpeg_on_error(cinfo);
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_on_error;
  err.base.emit_message = jpeg_on_message;

  std::vector<std::uint8_t> buffer;
  if (setjmp(err.jump)) {
    std::size_t offset = 0;
    if (cinfo.src != nullptr) offset = bytes.size() - cinfo.src->bytes_in_buffer;
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(std::string("malformed JPEG: ") + err.message, offset);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space != JCS_GRAYSCALE) cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  const int channels = cinfo.output_components;
  buffer.resize(static_cast<std::size_t>(width) * height * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buffer.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  std::vector<float> samples(buffer.begin(), buffer.end());
  return RasterImage(width, height, channels, std::move(samples), SampleMode::kInteger);
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
    return decode_jpeg(bytes);
  throw DecodeError("unrecognized image signature", 0);
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  const RasterImage src = img.converted(SampleMode::kInteger);
  int color_type = PNG_COLOR_TYPE_GRAY;
  if (src.channels() == 3) color_type = PNG_COLOR_TYPE_RGB;
  if (src.channels() == 4) color_type = PNG_COLOR_TYPE_RGB_ALPHA;

  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_on_error, png_on_warning);
  png_infop info = png_create_info_struct(png);
  std::vector<png_byte> buffer(src.samples().size());
  std::transform(src.samples().begin(), src.samples().end(), buffer.begin(),
                 [](float v) { return static_cast<png_byte>(std::clamp(v, 0.0f, 255.0f)); });
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_write_bytes, png_flush);
  png_set_IHDR(png, info, src.width(), src.height(), 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(src.width()) * src.channels();
  for (int y = 0; y < src.height(); ++y) png_write_row(png, buffer.data() + stride * y);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// ---------------------------------------------------------------------------

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
  if (width < 1 || height < 1) throw ShapeError("resize target must be at least 1x1");
  if (width == img.width() && height == img.height()) return img;
  RasterImage out(width, height, img.channels(), img.mode());
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  const bool round_out = img.mode() == SampleMode::kInteger;
  for (int y = 0; y < height; ++y) {
    // Half-pixel centers: output center (y + 0.5) maps to source center coordinates.
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < img.channels(); ++c) {
        const double top = (1.0 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
        const double bottom = (1.0 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
        double v = (1.0 - wy) * top + wy * bottom;
        if (round_out) v = std::round(v);
        out.at(x, y, c) = static_cast<float>(v);
      }
    }
  }
  return out;
}

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kDelta = 6.0 / 29.0;
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

}  // namespace

Lab srgb_to_lab(double r, double g, double b) {
  constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
  const double rl = srgb_to_linear(r), gl = srgb_to_linear(g), bl = srgb_to_linear(b);
  const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  const double fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
  return Lab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

LabImage rgb_to_lab(const RasterImage& img) {
  if (img.channels() != 3 && img.channels() != 4)
    throw ShapeError("rgb_to_lab needs an RGB or RGBA image, got " + std::to_string(img.channels()) +
                     " channel(s)");
  LabImage out(img.width(), img.height());
  const double scale = 1.0 / img.full_scale();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = srgb_to_lab(img.at(x, y, 0) * scale, img.at(x, y, 1) * scale, img.at(x, y, 2) * scale);
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RasterImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes);
}

void save_png(const std::filesystem::path& path, const RasterImage& img) {
  write_file(path, encode_png(img));
}

}  // namespace gap::raster
