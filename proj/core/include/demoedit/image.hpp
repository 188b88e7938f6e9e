#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace demoedit {

/// Dense row-major image with interleaved channels.
template <typename T, int Channels>
class Image {
 public:
  using value_type = T;
  static constexpr int channels = Channels;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * Channels, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * Channels +
           static_cast<std::size_t>(c);
  }
  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U, int C>
  bool same_size(const Image<U, C>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit RGB.
using RgbImage = Image<std::uint8_t, 3>;
/// 16-bit depth in millimeters; 0 marks a missing reading.
using DepthImage = Image<std::uint16_t, 1>;
/// Binary mask; any nonzero value is set.
using Mask = Image<std::uint8_t, 1>;

inline double depth_to_meters(std::uint16_t mm) { return static_cast<double>(mm) * 1e-3; }

// PNG codecs. Readers throw IoError on unreadable files and SchemaError on a
// bit depth or color type that does not match the requested image type.
RgbImage read_rgb_png(const std::filesystem::path& path);
DepthImage read_depth_png(const std::filesystem::path& path);
Mask read_mask_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const DepthImage& image);
void write_png(const std::filesystem::path& path, const Mask& image);

}  // namespace demoedit
