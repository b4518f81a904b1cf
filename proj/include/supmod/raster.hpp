// Copyright 2026 The Supmod Authors.
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


// 8-bit grayscale rasters in binary PGM ("P5", ASCII width/height/maxval
// header, maxval 255). Label maps use 0 for background and 255 for
// foreground; any other byte is rejected.

#ifndef SUPMOD_RASTER_HPP_
#define SUPMOD_RASTER_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supmod/core_model.hpp"

namespace supmod {

struct Raster {
  GridShape shape;
  std::vector<std::uint8_t> pixels;  // row-major
};

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline long read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long v = -1;
  if (!(in >> v)) throw std::runtime_error(std::string("raster: malformed header (") + what + ")");
  return v;
}

}  // namespace detail

inline Raster read_raster(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') throw std::runtime_error("raster: missing P5 magic");
  const long width = detail::read_header_int(in, "width");
  const long height = detail::read_header_int(in, "height");
  const long maxval = detail::read_header_int(in, "maxval");
  if (width <= 0 || height <= 0 || width > 1 << 16 || height > 1 << 16) {
    throw std::runtime_error("raster: invalid dimensions " + std::to_string(width) + "x" +
                             std::to_string(height));
  }
  if (maxval != 255) throw std::runtime_error("raster: maxval must be 255, got " + std::to_string(maxval));
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) throw std::runtime_error("raster: malformed header terminator");

  Raster r{GridShape(static_cast<int>(width), static_cast<int>(height)), {}};
  r.pixels.resize(r.shape.pixels());
  in.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(r.pixels.size())) {
    throw std::runtime_error("raster: header declares " + std::to_string(r.pixels.size()) +
                             " pixels but only " + std::to_string(in.gcount()) + " present");
  }
  if (in.peek() != EOF) throw std::runtime_error("raster: trailing data after pixel block");
  return r;
}

inline void write_raster(std::ostream& out, const Raster& r) {
  if (r.pixels.size() != r.shape.pixels()) throw std::invalid_argument("write_raster: size mismatch");
  out << "P5\n" << r.shape.width << ' ' << r.shape.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (!out) throw std::runtime_error("write_raster: write failed");
}

inline Raster read_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_raster(in);
}

inline void write_raster(const std::string& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create '" + path + "'");
  write_raster(out, r);
}

inline Labeling labels_from_raster(const Raster& r) {
  Labeling y(r.pixels.size());
  for (std::size_t j = 0; j < r.pixels.size(); ++j) {
    const auto v = r.pixels[j];
    if (v != 0 && v != 255) {
      throw std::runtime_error("label map: pixel " + std::to_string(j) + " has value " +
                               std::to_string(v) + " (expected 0 or 255)");
    }
    y.set(j, v == 255 ? 1 : -1);
  }
  return y;
}

inline Raster raster_from_labels(const Labeling& y, const GridShape& shape) {
  if (y.size() != shape.pixels()) throw std::invalid_argument("raster_from_labels: size mismatch");
  Raster r{shape, std::vector<std::uint8_t>(y.size())};
  for (std::size_t j = 0; j < y.size(); ++j) r.pixels[j] = y.positive(j) ? 255 : 0;
  return r;
}

/// Feature channel in [lo, hi] from byte values (0 -> lo, 255 -> hi).
inline std::vector<double> channel_from_raster(const Raster& r, double lo = 0.0, double hi = 1.0) {
  std::vector<double> out(r.pixels.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = lo + (hi - lo) * r.pixels[j] / 255.0;
  return out;
}

/// Quantizes values clamped to [lo, hi] into bytes.
inline Raster raster_from_channel(std::span<const double> values, const GridShape& shape, double lo,
                                  double hi) {
  if (values.size() != shape.pixels()) throw std::invalid_argument("raster_from_channel: size mismatch");
  if (!(hi > lo)) throw std::invalid_argument("raster_from_channel: empty range");
  Raster r{shape, std::vector<std::uint8_t>(values.size())};
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double t = std::clamp((values[j] - lo) / (hi - lo), 0.0, 1.0);
    r.pixels[j] = static_cast<std::uint8_t>(std::lround(255.0 * t));
  }
  return r;
}

}  // namespace supmod

#endif  // SUPMOD_RASTER_HPP_
