#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace gaussbp {

/// Row-major raster.
template <typename T>
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), data(w * h, fill) {}

  T& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
  const T& at(std::size_t row, std::size_t col) const { return data[row * width + col]; }
  std::size_t size() const noexcept { return data.size(); }

  friend bool operator==(const Raster&, const Raster&) = default;
};

using GrayImage = Raster<std::uint8_t>;
/// Real-valued map, NaN marks invalid pixels.
using FloatImage = Raster<double>;

/// round(0.299 r + 0.587 g + 0.114 b).
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// PGM (P2/P5), PPM (P3/P6) or 8-bit PNG; colour goes through luminance().
/// Maxvals other than 255 are rescaled to 0..255. Throws DecodeError.
GrayImage load_image(const std::filesystem::path& path);

/// Disparity map from PFM (non-finite = invalid), PGM (raw values, 8 or 16
/// bit) or 8-bit PNG. Values are multiplied by `scale`; with zero_invalid a
/// stored 0 becomes NaN. Throws DecodeError.
FloatImage load_disparity(const std::filesystem::path& path, double scale = 1.0, bool zero_invalid = false);

/// Binary P5. Throws Error on I/O failure.
void save_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Binary little-endian PFM ("Pf"), NaN written as +inf.
void save_pfm(const std::filesystem::path& path, const FloatImage& image);

/// Averages non-overlapping factor x factor blocks (partial edge blocks are
/// dropped). Throws std::invalid_argument for factor 0.
GrayImage downsample_area(const GrayImage& image, std::size_t factor);

/// Block average over finite pixels only, divided by `factor` so the
/// result is in downsampled pixel units; blocks with no valid pixel are NaN.
FloatImage downsample_disparity(const FloatImage& disparity, std::size_t factor);

/// Window [row0, row0 + h) x [col0, col0 + w). Throws std::out_of_range.
template <typename T>
Raster<T> crop(const Raster<T>& image, std::size_t row0, std::size_t col0, std::size_t h, std::size_t w);

extern template Raster<std::uint8_t> crop(const Raster<std::uint8_t>&, std::size_t, std::size_t, std::size_t,
                                          std::size_t);
extern template Raster<double> crop(const Raster<double>&, std::size_t, std::size_t, std::size_t, std::size_t);

}  // namespace gaussbp
