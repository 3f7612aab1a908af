// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats: PFM float maps, 8/16-bit PNG views, the light-field directory
// (manifest + one PNG per view) and color-coded disparity renderings.
// Byte-level layouts are documented in docs/FORMATS.md.

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "lumen/colormap.hpp"
#include "lumen/core.hpp"
#include "lumen/grid.hpp"

namespace lumen {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PFM

namespace detail {

inline std::uint32_t byteswap32(std::uint32_t v) noexcept {
  return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

/// Next whitespace-delimited header token; consumes exactly one trailing whitespace byte.
inline std::string_view pfm_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos || pos >= bytes.size()) throw DataError("malformed PFM header");
  std::string_view tok = bytes.substr(start, pos - start);
  ++pos;
  return tok;
}

}  // namespace detail

/// Single-channel little-endian PFM: "Pf\n<W> <H>\n-1.0\n", rows bottom-to-top, float32.
inline std::string encode_pfm(const Image& grid) {
  std::string out = "Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n-1.0\n";
  const std::size_t header = out.size();
  out.resize(header + grid.size() * 4);
  char* p = out.data() + header;
  for (int y = grid.height() - 1; y >= 0; --y) {
    for (int x = 0; x < grid.width(); ++x) {
      const double v = grid(x, y);
      if (!std::isfinite(v)) throw ContractError("encode_pfm: non-finite sample");
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      if constexpr (std::endian::native == std::endian::big) bits = detail::byteswap32(bits);
      std::memcpy(p, &bits, 4);
      p += 4;
    }
  }
  return out;
}

inline Image decode_pfm(std::string_view bytes) {
  std::size_t pos = 0;
  const std::string_view magic = detail::pfm_token(bytes, pos);
  if (magic != "Pf") {
    throw DataError(magic == "PF" ? "PFM: three-channel files are not supported" : "PFM: bad magic");
  }
  int w = 0;
  int h = 0;
  double scale = 0.0;
  try {
    w = std::stoi(std::string(detail::pfm_token(bytes, pos)));
    h = std::stoi(std::string(detail::pfm_token(bytes, pos)));
    scale = std::stod(std::string(detail::pfm_token(bytes, pos)));
  } catch (const std::logic_error&) {
    throw DataError("malformed PFM header");
  }
  if (w <= 0 || h <= 0 || scale == 0.0 || !std::isfinite(scale)) throw DataError("malformed PFM header");
  const bool little = scale < 0.0;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 4;
  if (bytes.size() - pos < need) throw DataError("truncated PFM payload");
  Image out(w, h);
  const char* p = bytes.data() + pos;
  const bool swap = little != (std::endian::native == std::endian::little);
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits;
      std::memcpy(&bits, p, 4);
      p += 4;
      if (swap) bits = detail::byteswap32(bits);
      out(x, y) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return out;
}

inline void write_pfm(const Image& grid, const fs::path& path) { detail::write_file(path, encode_pfm(grid)); }
inline Image read_pfm(const fs::path& path) { return decode_pfm(detail::read_file(path)); }

// ---------------------------------------------------------------------------
// PNG

/// Interleaved RGB samples at the file's bit depth (8 or 16).
struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> rgb;
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError(std::string("cannot open ") + path.string());
  return f;
}

inline bool png_read_into(std::FILE* f, PngImage& img, std::vector<unsigned char>& buf,
                          std::vector<png_bytep>& rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, f);
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int type = png_get_color_type(png, info);
  if (type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (type == PNG_COLOR_TYPE_GRAY || type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (png_get_channels(png, info) != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.bit_depth = out_depth;
  buf.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = buf.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

inline bool png_write_from(std::FILE* f, int w, int h, int depth, std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace detail

inline PngImage read_png(const fs::path& path) {
  auto f = detail::open_file(path, "rb");
  PngImage img;
  std::vector<unsigned char> buf;
  std::vector<png_bytep> rows;
  if (!detail::png_read_into(f.get(), img, buf, rows)) throw DataError("cannot decode PNG " + path.string());
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3;
  img.rgb.resize(n);
  if (img.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) img.rgb[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < n; ++i) img.rgb[i] = buf[i];
  }
  return img;
}

/// Writes interleaved RGB at 8 or 16 bits (16-bit samples stored big-endian as PNG requires).
inline void write_png(const PngImage& img, const fs::path& path) {
  if (img.bit_depth != 8 && img.bit_depth != 16) throw ContractError("write_png: bit depth must be 8 or 16");
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3;
  if (img.rgb.size() != n) throw ContractError("write_png: sample count does not match dimensions");
  const std::size_t bps = img.bit_depth == 16 ? 2 : 1;
  std::vector<unsigned char> buf(n * bps);
  for (std::size_t i = 0; i < n; ++i) {
    if (bps == 2) {
      buf[2 * i] = static_cast<unsigned char>(img.rgb[i] >> 8);
      buf[2 * i + 1] = static_cast<unsigned char>(img.rgb[i] & 0xff);
    } else {
      buf[i] = static_cast<unsigned char>(img.rgb[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  const std::size_t rowbytes = static_cast<std::size_t>(img.width) * 3 * bps;
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = buf.data() + y * rowbytes;
  auto f = detail::open_file(path, "wb");
  if (!detail::png_write_from(f.get(), img.width, img.height, img.bit_depth, rows)) {
    throw DataError("cannot encode PNG " + path.string());
  }
}

inline View png_to_view(const PngImage& img) {
  const double maxv = img.bit_depth == 16 ? 65535.0 : 255.0;
  View v(img.width, img.height);
  std::size_t i = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c) v[c](x, y) = img.rgb[i++] / maxv;
  return v;
}

inline std::uint16_t quantize16(double v) noexcept {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

inline PngImage view_to_png16(const View& v) {
  PngImage img{v.width(), v.height(), 16, {}};
  img.rgb.reserve(static_cast<std::size_t>(v.width()) * static_cast<std::size_t>(v.height()) * 3);
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x)
      for (std::size_t c = 0; c < 3; ++c) img.rgb.push_back(quantize16(v[c](x, y)));
  return img;
}

/// The light-field as it will read back from 16-bit storage.
inline LightField quantize16(const LightField& lf) {
  std::vector<View> views = lf.views();
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (!lf.valid_flags()[i]) continue;
    for (auto& ch : views[i].channels)
      for (double& s : ch.values()) s = quantize16(s) / 65535.0;
  }
  return lf.with_views(std::move(views));
}

// ---------------------------------------------------------------------------
// Light-field directory

inline constexpr const char* kManifestName = "lightfield.txt";

/// Ordered key=value lines; '#' starts a comment.
struct LightFieldManifest {
  int ns = 0;
  int nt = 0;
  int center_s = 0;
  int center_t = 0;
  double kappa_k = 1.0;
  std::string view_pattern = "view_{s}_{t}.png";
  /// Absent means every view is valid.
  std::optional<std::vector<ViewIndex>> valid_views;

  [[nodiscard]] std::string file_for(ViewIndex v) const {
    std::string out = view_pattern;
    auto subst = [&](std::string_view key, int value) {
      for (std::size_t p = out.find(key); p != std::string::npos; p = out.find(key)) {
        out.replace(p, key.size(), std::to_string(value));
      }
    };
    subst("{s}", v.s);
    subst("{t}", v.t);
    return out;
  }
};

enum class LfioErrorKind { MissingManifest, MalformedManifest, MissingView, DimensionMismatch, CenterInvalid };

class LfioError : public DataError {
 public:
  LfioError(LfioErrorKind kind, const std::string& what) : DataError(what), kind_(kind) {}
  [[nodiscard]] LfioErrorKind kind() const noexcept { return kind_; }

 private:
  LfioErrorKind kind_;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T v{};
  ss >> v;
  if (!ss || !(ss >> std::ws).eof()) {
    throw LfioError(LfioErrorKind::MalformedManifest, "manifest: bad value for " + key + ": '" + value + "'");
  }
  return v;
}

}  // namespace detail

inline LightFieldManifest parse_manifest(std::string_view text) {
  LightFieldManifest m;
  bool have_ns = false, have_nt = false, have_cs = false, have_ct = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw LfioError(LfioErrorKind::MalformedManifest, "manifest line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key == "ns") m.ns = detail::parse_number<int>(key, value), have_ns = true;
    else if (key == "nt") m.nt = detail::parse_number<int>(key, value), have_nt = true;
    else if (key == "center_s") m.center_s = detail::parse_number<int>(key, value), have_cs = true;
    else if (key == "center_t") m.center_t = detail::parse_number<int>(key, value), have_ct = true;
    else if (key == "kappa_k") m.kappa_k = detail::parse_number<double>(key, value);
    else if (key == "view_pattern") m.view_pattern = value;
    else if (key == "valid_views") {
      std::vector<ViewIndex> views;
      std::istringstream vs(value);
      std::string pair;
      while (vs >> pair) {
        const auto comma = pair.find(',');
        if (comma == std::string::npos) {
          throw LfioError(LfioErrorKind::MalformedManifest, "manifest: valid_views entries must be s,t");
        }
        views.push_back({detail::parse_number<int>(key, pair.substr(0, comma)),
                         detail::parse_number<int>(key, pair.substr(comma + 1))});
      }
      m.valid_views = std::move(views);
    } else {
      throw LfioError(LfioErrorKind::MalformedManifest, "manifest: unknown key '" + key + "'");
    }
  }
  if (!(have_ns && have_nt && have_cs && have_ct)) {
    throw LfioError(LfioErrorKind::MalformedManifest, "manifest: ns, nt, center_s and center_t are required");
  }
  if (m.ns <= 0 || m.nt <= 0) throw LfioError(LfioErrorKind::MalformedManifest, "manifest: ns and nt must be positive");
  if (m.view_pattern.find("{s}") == std::string::npos || m.view_pattern.find("{t}") == std::string::npos) {
    throw LfioError(LfioErrorKind::MalformedManifest, "manifest: view_pattern must contain {s} and {t}");
  }
  return m;
}

inline std::string format_manifest(const LightFieldManifest& m) {
  std::ostringstream out;
  out.precision(17);
  out << "# lumen light-field manifest\n";
  out << "ns=" << m.ns << "\nnt=" << m.nt << "\ncenter_s=" << m.center_s << "\ncenter_t=" << m.center_t << "\n";
  out << "kappa_k=" << m.kappa_k << "\nview_pattern=" << m.view_pattern << "\n";
  if (m.valid_views) {
    out << "valid_views=";
    for (std::size_t i = 0; i < m.valid_views->size(); ++i) {
      out << (i ? " " : "") << (*m.valid_views)[i].s << "," << (*m.valid_views)[i].t;
    }
    out << "\n";
  }
  return out.str();
}

/// Reads the manifest and every valid view. Problems with individual views are
/// collected so the error names all of them.
inline LightField load_lightfield(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  if (!fs::exists(manifest_path)) {
    throw LfioError(LfioErrorKind::MissingManifest, "missing manifest " + manifest_path.string());
  }
  const LightFieldManifest m = parse_manifest(detail::read_file(manifest_path));
  const std::size_t n = static_cast<std::size_t>(m.ns) * static_cast<std::size_t>(m.nt);
  std::vector<bool> valid(n, !m.valid_views.has_value());
  auto slot = [&](ViewIndex v) { return static_cast<std::size_t>(v.t) * static_cast<std::size_t>(m.ns) + v.s; };
  if (m.valid_views) {
    for (ViewIndex v : *m.valid_views) {
      if (v.s < 0 || v.s >= m.ns || v.t < 0 || v.t >= m.nt) {
        throw LfioError(LfioErrorKind::MalformedManifest, "manifest: valid view " + to_string(v) + " out of range");
      }
      valid[slot(v)] = true;
    }
  }
  const ViewIndex center{m.center_s, m.center_t};
  if (center.s < 0 || center.s >= m.ns || center.t < 0 || center.t >= m.nt || !valid[slot(center)]) {
    throw LfioError(LfioErrorKind::CenterInvalid, "center view " + to_string(center) + " is not a valid view");
  }

  std::vector<View> views(n);
  std::string missing;
  for (int t = 0; t < m.nt; ++t) {
    for (int s = 0; s < m.ns; ++s) {
      if (!valid[slot({s, t})]) continue;
      const fs::path p = dir / m.file_for({s, t});
      if (!fs::exists(p)) {
        missing += (missing.empty() ? "" : ", ") + to_string(ViewIndex{s, t}) + " " + p.filename().string();
        continue;
      }
      views[slot({s, t})] = png_to_view(read_png(p));
    }
  }
  if (!missing.empty()) throw LfioError(LfioErrorKind::MissingView, "missing views: " + missing);

  const View& c = views[slot(center)];
  std::string mismatched;
  for (int t = 0; t < m.nt; ++t) {
    for (int s = 0; s < m.ns; ++s) {
      const View& v = views[slot({s, t})];
      if (valid[slot({s, t})] && (v.width() != c.width() || v.height() != c.height())) {
        mismatched += (mismatched.empty() ? "" : ", ") + to_string(ViewIndex{s, t}) + " is " +
                      std::to_string(v.width()) + "x" + std::to_string(v.height());
      }
    }
  }
  if (!mismatched.empty()) {
    throw LfioError(LfioErrorKind::DimensionMismatch, "views differ from center " + std::to_string(c.width()) + "x" +
                                                          std::to_string(c.height()) + ": " + mismatched);
  }
  return LightField(m.ns, m.nt, center, m.kappa_k, std::move(views), std::move(valid));
}

/// Writes the manifest and one 16-bit PNG per valid view.
inline void save_lightfield(const LightField& lf, const fs::path& dir) {
  fs::create_directories(dir);
  LightFieldManifest m;
  m.ns = lf.ns();
  m.nt = lf.nt();
  m.center_s = lf.center().s;
  m.center_t = lf.center().t;
  m.kappa_k = lf.kappa_k();
  if (lf.valid_count() != lf.ns() * lf.nt()) m.valid_views = lf.valid_views();
  for (ViewIndex v : lf.valid_views()) write_png(view_to_png16(lf.view(v)), dir / m.file_for(v));
  detail::write_file(dir / kManifestName, format_manifest(m));
}

// ---------------------------------------------------------------------------
// Disparity rendering

/// Color-map index of every pixel. Values outside [lo,hi] clamp; lo == hi maps to the middle entry.
inline Grid<std::uint8_t> colormap_indices(const Image& field, std::optional<std::pair<double, double>> range) {
  double lo, hi;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(lo < hi)) throw ContractError("render range requires lo < hi");
  } else {
    if (field.empty()) throw ContractError("cannot render an empty field");
    const auto [mn, mx] = std::minmax_element(field.values().begin(), field.values().end());
    lo = *mn;
    hi = *mx;
  }
  Grid<std::uint8_t> idx(field.width(), field.height(), 128);
  if (lo == hi) return idx;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double v = field.values()[i];
    if (!std::isfinite(v)) throw ContractError("cannot render a non-finite disparity");
    const double u = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    idx.values()[i] = static_cast<std::uint8_t>(std::lround(u * 255.0));
  }
  return idx;
}

inline void render_disparity_png(const Image& field, std::optional<std::pair<double, double>> range,
                                 const fs::path& path) {
  const auto idx = colormap_indices(field, range);
  PngImage img{field.width(), field.height(), 8, {}};
  img.rgb.reserve(field.size() * 3);
  for (std::uint8_t i : idx.values()) {
    const Rgb8 c = kColormap[i];
    img.rgb.insert(img.rgb.end(), {c.r, c.g, c.b});
  }
  write_png(img, path);
}

}  // namespace lumen
