#include "gaussbp/image.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gaussbp/error.hpp"

namespace gaussbp {

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Raw samples of a netpbm file, channel-interleaved.
struct Netpbm {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  unsigned maxval = 255;
  std::vector<unsigned> samples;
};

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const std::string& name) : s_(bytes), name_(name) {}

  unsigned long number() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw DecodeError(name_ + ": malformed netpbm header");
    return std::stoul(s_.substr(start, pos_ - start));
  }

  std::size_t pos() const { return pos_; }
  void skip_one_space() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      throw DecodeError(name_ + ": missing whitespace before raster");
    }
    ++pos_;
  }
  void seek(std::size_t p) { pos_ = p; }

 private:
  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

Netpbm parse_netpbm(const std::string& bytes, const std::string& name) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw DecodeError(name + ": not a netpbm file");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw DecodeError(name + ": unsupported netpbm type P" + std::string(1, kind));
  }
  Netpbm img;
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  HeaderReader r(bytes, name);
  r.seek(2);
  img.width = r.number();
  img.height = r.number();
  const unsigned long maxval = r.number();
  if (img.width == 0 || img.height == 0) throw DecodeError(name + ": empty image");
  if (maxval == 0 || maxval > 65535) throw DecodeError(name + ": maxval out of range");
  img.maxval = static_cast<unsigned>(maxval);

  const std::size_t count = img.width * img.height * img.channels;
  img.samples.resize(count);
  if (kind == '2' || kind == '3') {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned long v = r.number();
      if (v > maxval) throw DecodeError(name + ": sample exceeds maxval");
      img.samples[i] = static_cast<unsigned>(v);
    }
    return img;
  }
  r.skip_one_space();
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  if (bytes.size() - r.pos() < count * bytes_per) throw DecodeError(name + ": truncated raster");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + r.pos());
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = bytes_per == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
    if (v > maxval) throw DecodeError(name + ": sample exceeds maxval");
    img.samples[i] = v;
  }
  return img;
}

struct Rgba {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // 4 bytes per pixel
};

Rgba read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  const std::string name = path.string();
  if (!png_image_begin_read_from_file(&image, name.c_str())) {
    throw DecodeError(name + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw DecodeError(name + ": only 8-bit PNG is supported");
  }
  image.format = PNG_FORMAT_RGBA;
  Rgba out;
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DecodeError(name + ": " + msg);
  }
  return out;
}

bool has_png_signature(const std::string& bytes) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSig, 8) == 0;
}

FloatImage parse_pfm(const std::string& bytes, const std::string& name) {
  std::istringstream in(bytes);
  std::string magic;
  std::size_t w = 0;
  std::size_t h = 0;
  double scale = 0.0;
  if (!(in >> magic >> w >> h >> scale) || magic != "Pf") throw DecodeError(name + ": only grayscale PFM is supported");
  if (w == 0 || h == 0 || scale == 0.0) throw DecodeError(name + ": malformed PFM header");
  in.get();  // single whitespace before the raster
  const auto offset = static_cast<std::size_t>(in.tellg());
  if (bytes.size() < offset + w * h * 4) throw DecodeError(name + ": truncated PFM raster");
  const bool little = scale < 0.0;
  FloatImage img(w, h);
  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      const std::size_t k = offset + ((h - 1 - row) * w + col) * 4;  // stored bottom-to-top
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) {
        const auto byte = static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[k + b]));
        u |= little ? byte << (8 * b) : byte << (8 * (3 - b));
      }
      const float f = std::bit_cast<float>(u);
      img.at(row, col) = std::isfinite(f) ? static_cast<double>(f) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return img;
}

std::uint8_t rescale(unsigned v, unsigned maxval) {
  if (maxval == 255) return static_cast<std::uint8_t>(v);
  return static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
}

}  // namespace

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
  return static_cast<std::uint8_t>(std::clamp(y, 0L, 255L));
}

GrayImage load_image(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  if (has_png_signature(bytes)) {
    const Rgba rgba = read_png(path);
    GrayImage img(rgba.width, rgba.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const std::uint8_t* p = &rgba.pixels[4 * i];
      img.data[i] = luminance(p[0], p[1], p[2]);
    }
    return img;
  }
  const Netpbm pnm = parse_netpbm(bytes, path.string());
  GrayImage img(pnm.width, pnm.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (pnm.channels == 1) {
      img.data[i] = rescale(pnm.samples[i], pnm.maxval);
    } else {
      img.data[i] = luminance(rescale(pnm.samples[3 * i], pnm.maxval), rescale(pnm.samples[3 * i + 1], pnm.maxval),
                              rescale(pnm.samples[3 * i + 2], pnm.maxval));
    }
  }
  return img;
}

FloatImage load_disparity(const std::filesystem::path& path, double scale, bool zero_invalid) {
  const std::string bytes = read_all(path);
  FloatImage img;
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == 'f') {
    img = parse_pfm(bytes, path.string());
  } else if (has_png_signature(bytes)) {
    const Rgba rgba = read_png(path);
    img = FloatImage(rgba.width, rgba.height);
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = rgba.pixels[4 * i];
  } else {
    const Netpbm pnm = parse_netpbm(bytes, path.string());
    if (pnm.channels != 1) throw DecodeError(path.string() + ": disparity must be single-channel");
    img = FloatImage(pnm.width, pnm.height);
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = pnm.samples[i];
  }
  for (double& v : img.data) {
    if (zero_invalid && v == 0.0) {
      v = std::numeric_limits<double>::quiet_NaN();
    } else {
      v *= scale;
    }
  }
  return img;
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
  if (!out) throw Error("short write to " + path.string());
}

void save_pfm(const std::filesystem::path& path, const FloatImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "Pf\n" << image.width << ' ' << image.height << "\n-1\n";
  for (std::size_t r = image.height; r-- > 0;) {
    for (std::size_t c = 0; c < image.width; ++c) {
      const double v = image.at(r, c);
      const float f = std::isfinite(v) ? static_cast<float>(v) : std::numeric_limits<float>::infinity();
      const auto u = std::bit_cast<std::uint32_t>(f);
      const char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                         static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
      out.write(b, 4);
    }
  }
  if (!out) throw Error("short write to " + path.string());
}

GrayImage downsample_area(const GrayImage& image, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("downsample_area: factor must be >= 1");
  GrayImage out(image.width / factor, image.height / factor);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      unsigned long sum = 0;
      for (std::size_t dr = 0; dr < factor; ++dr) {
        for (std::size_t dc = 0; dc < factor; ++dc) sum += image.at(r * factor + dr, c * factor + dc);
      }
      out.at(r, c) = static_cast<std::uint8_t>(std::lround(static_cast<double>(sum) / (factor * factor)));
    }
  }
  return out;
}

FloatImage downsample_disparity(const FloatImage& disparity, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("downsample_disparity: factor must be >= 1");
  FloatImage out(disparity.width / factor, disparity.height / factor);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t dr = 0; dr < factor; ++dr) {
        for (std::size_t dc = 0; dc < factor; ++dc) {
          const double v = disparity.at(r * factor + dr, c * factor + dc);
          if (std::isfinite(v)) {
            sum += v;
            ++n;
          }
        }
      }
      out.at(r, c) = n ? sum / static_cast<double>(n) / static_cast<double>(factor)
                       : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

template <typename T>
Raster<T> crop(const Raster<T>& image, std::size_t row0, std::size_t col0, std::size_t h, std::size_t w) {
  if (row0 + h > image.height || col0 + w > image.width) throw std::out_of_range("crop: window outside image");
  Raster<T> out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) out.at(r, c) = image.at(row0 + r, col0 + c);
  }
  return out;
}

template Raster<std::uint8_t> crop(const Raster<std::uint8_t>&, std::size_t, std::size_t, std::size_t, std::size_t);
template Raster<double> crop(const Raster<double>&, std::size_t, std::size_t, std::size_t, std::size_t);

}  // namespace gaussbp
