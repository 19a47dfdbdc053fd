#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gap::raster {

// How sample values are scaled: integer mode holds 0..255, normalized mode 0..1.
enum class SampleMode { kInteger, kNormalized };

// Interleaved row-major pixel grid with 1 (gray), 3 (RGB) or 4 (RGBA) channels.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, SampleMode mode = SampleMode::kInteger);
  RasterImage(int width, int height, int channels, std::vector<float> samples,
              SampleMode mode = SampleMode::kInteger);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  SampleMode mode() const { return mode_; }
  bool empty() const { return samples_.empty(); }

  float at(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float& at(int x, int y, int c) {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::span<const float> samples() const { return samples_; }
  std::span<float> samples() { return samples_; }

  // Maximum representable sample: 255 or 1.
  float full_scale() const { return mode_ == SampleMode::kInteger ? 255.0f : 1.0f; }

  // Same pixels rescaled to the requested mode (integer mode rounds).
  RasterImage converted(SampleMode mode) const;
  // Same pixels with `channels` channels: gray expands to RGB, alpha is added
  // opaque or dropped.
  RasterImage with_channels(int channels) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  SampleMode mode_ = SampleMode::kInteger;
  std::vector<float> samples_;
};

struct Lab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

class LabImage {
 public:
  LabImage(int width, int height) : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height) {}

  int width() const { return width_; }
  int height() const { return height_; }
  const Lab& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  Lab& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

 private:
  int width_;
  int height_;
  std::vector<Lab> pixels_;
};

// PNG or JPEG by signature. Throws DecodeError with the byte offset reached
// when parsing failed.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

// Lossless 8-bit PNG with pinned compression settings so equal images always
// produce equal bytes.
std::vector<std::uint8_t> encode_png(const RasterImage& img);

RasterImage resize_bilinear(const RasterImage& img, int width, int height);

// sRGB (D65) to CIE L*a*b*. Alpha is ignored. Throws ShapeError for gray input.
LabImage rgb_to_lab(const RasterImage& img);
Lab srgb_to_lab(double r, double g, double b);  // components in [0,1]

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
RasterImage load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const RasterImage& img);

}  // namespace gap::raster
