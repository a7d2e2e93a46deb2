// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "detail/bytes.hpp"
#include "errors.hpp"
#include "render.hpp"

namespace fevis {

namespace detail {

inline void require_finite_grid(const ImageGrid& grid, const char* op) {
  if (grid.width < 1 || grid.height < 1 ||
      grid.values.size() != static_cast<std::size_t>(grid.width) *
                                static_cast<std::size_t>(grid.height))
    throw ValidationError(std::string(op) + ": image size does not match its buffer");
  for (double v : grid.values)
    if (!std::isfinite(v))
      throw ValidationError(std::string(op) + ": image contains a non-finite value");
}

} // namespace detail

/// Write a raster as a 2-D double NRRD (attached header, raw little-endian
/// payload, x fastest).  The header is byte-for-byte reproducible.
inline void write_nrrd(const std::string& path, const ImageGrid& grid) {
  detail::require_finite_grid(grid, "write_nrrd");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "NRRD0004\n"
      << "type: double\n"
      << "dimension: 2\n"
      << "sizes: " << grid.width << " " << grid.height << "\n"
      << "endian: little\n"
      << "encoding: raw\n"
      << "\n";
  for (double v : grid.values) detail::write_le(out, v);
  if (!out) throw IoError("failed while writing '" + path + "'");
}

/// Read back a NRRD produced by write_nrrd (or an equivalent one: 2-D, type
/// double, raw encoding, attached header).  Extra header fields are ignored.
inline ImageGrid read_nrrd(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line) || line.rfind("NRRD", 0) != 0)
    throw IoError("'" + path + "' is not a NRRD file");

  std::string type, encoding, endian;
  int dimension = 0, width = 0, height = 0;
  while (std::getline(in, line) && !line.empty()) {
    if (line[0] == '#') continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos)
      throw IoError("'" + path + "': malformed header line '" + line + "'");
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 2);
    if (key == "type") type = value;
    else if (key == "encoding") encoding = value;
    else if (key == "endian") endian = value;
    else if (key == "dimension") dimension = std::atoi(value.c_str());
    else if (key == "sizes") {
      std::istringstream sizes(value);
      if (!(sizes >> width >> height))
        throw IoError("'" + path + "': cannot parse sizes '" + value + "'");
    }
    // other fields are legal NRRD but carry nothing we need
  }
  if (type != "double")
    throw IoError("'" + path + "': unsupported type '" + type + "' (need double)");
  if (encoding != "raw")
    throw IoError("'" + path + "': unsupported encoding '" + encoding + "' (need raw)");
  if (dimension != 2)
    throw IoError("'" + path + "': unsupported dimension " + std::to_string(dimension));
  if (endian != "little" && endian != "big")
    throw IoError("'" + path + "': missing or invalid endian field");
  if (width < 1 || height < 1)
    throw IoError("'" + path + "': invalid sizes " + std::to_string(width) + " " +
                  std::to_string(height));

  ImageGrid grid;
  grid.width = width;
  grid.height = height;
  grid.values.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (double& v : grid.values) {
    if (endian == "little") {
      v = detail::read_le<double>(in, "NRRD payload");
    } else {
      // Stored big-endian: read raw and reverse.
      unsigned char bytes[sizeof(double)];
      in.read(reinterpret_cast<char*>(bytes), sizeof(double));
      if (!in) throw IoError("unexpected end of file while reading NRRD payload");
      std::reverse(bytes, bytes + sizeof(double));
      std::memcpy(&v, bytes, sizeof(double));
    }
  }
  return grid;
}

/// Write an 8-bit binary PGM with the value range mapped linearly onto
/// 0..255 (a flat image maps to all zeros).  Row 0 is written first; PGM
/// viewers treat it as the top of the picture.
inline void write_pgm(const std::string& path, const ImageGrid& grid) {
  detail::require_finite_grid(grid, "write_pgm");
  const auto [lo_it, hi_it] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double scale = (hi > lo) ? 255.0 / (hi - lo) : 0.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  for (double v : grid.values) {
    const int g = static_cast<int>(std::lround((v - lo) * scale));
    const unsigned char byte = static_cast<unsigned char>(std::clamp(g, 0, 255));
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

} // namespace fevis
