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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "lumen/lfio.hpp"
#include "support/oracles.hpp"

namespace {

namespace fs = std::filesystem;
using lumen::Image;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / ("lumen_lfio_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string bytes(std::initializer_list<int> b) {
  std::string s;
  for (int v : b) s.push_back(static_cast<char>(v));
  return s;
}

TEST(Pfm, ByteLevelFixture) {
  Image g(2, 1);
  g(0, 0) = 0.5;
  g(1, 0) = -1.25;
  const std::string expected = "Pf\n2 1\n-1.0\n" + bytes({0x00, 0x00, 0x00, 0x3F, 0x00, 0x00, 0xA0, 0xBF});
  EXPECT_EQ(lumen::encode_pfm(g), expected);
  EXPECT_EQ(lumen::decode_pfm(expected), g);
}

TEST(Pfm, RowsAreStoredBottomToTop) {
  Image g(1, 2);
  g(0, 0) = 1.0;  // top row
  g(0, 1) = 2.0;
  const std::string enc = lumen::encode_pfm(g);
  float first;
  std::memcpy(&first, enc.data() + enc.size() - 8, 4);
  EXPECT_EQ(first, 2.0f);
}

TEST(Pfm, BigEndianPayloadIsSwapped) {
  const std::string big = "Pf\n2 1\n1.0\n" + bytes({0x3F, 0x00, 0x00, 0x00, 0xBF, 0xA0, 0x00, 0x00});
  const Image g = lumen::decode_pfm(big);
  EXPECT_EQ(g(0, 0), 0.5);
  EXPECT_EQ(g(1, 0), -1.25);
}

TEST(Pfm, MalformedInputIsDataError) {
  EXPECT_THROW(lumen::decode_pfm("PF\n1 1\n-1.0\n" + bytes({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})), lumen::DataError);
  EXPECT_THROW(lumen::decode_pfm("Pf\n2 1\n-1.0\n" + bytes({0, 0, 0, 0})), lumen::DataError);
  EXPECT_THROW(lumen::decode_pfm("Pf\nx 1\n-1.0\n"), lumen::DataError);
  EXPECT_THROW(lumen::decode_pfm(""), lumen::DataError);
  EXPECT_THROW(lumen::read_pfm("/nonexistent/lumen.pfm"), lumen::DataError);
}

TEST(Pfm, RandomRoundTripIsBitExact) {
  oracle::Rng rng(1);
  const auto dir = scratch("pfm");
  for (int i = 0; i < 100; ++i) {
    const int w = 1 + static_cast<int>(oracle::uniform(rng, 0, 20));
    const int h = 1 + static_cast<int>(oracle::uniform(rng, 0, 20));
    Image g = oracle::random_image(w, h, rng, -1e3, 1e3);
    for (double& v : g.values()) v = static_cast<float>(v);
    lumen::write_pfm(g, dir / "g.pfm");
    ASSERT_EQ(lumen::read_pfm(dir / "g.pfm"), g);
  }
}

lumen::LightField sample_lf(oracle::Rng& rng, int ns, int nt, lumen::ViewIndex center, double kappa,
                            const std::vector<bool>& valid) {
  std::vector<lumen::View> views(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (!valid[i]) continue;
    views[i] = lumen::View(std::array<Image, 3>{oracle::random_image(7, 5, rng), oracle::random_image(7, 5, rng),
                                                oracle::random_image(7, 5, rng)});
  }
  return lumen::LightField(ns, nt, center, kappa, std::move(views), valid);
}

TEST(LightFieldDirectory, RoundTripPreservesEverything) {
  oracle::Rng rng(2);
  const auto dir = scratch("roundtrip");
  std::vector<bool> valid(12, true);
  valid[0] = valid[3] = false;
  const auto lf = sample_lf(rng, 4, 3, {1, 1}, 1.25, valid);
  lumen::save_lightfield(lf, dir);
  const auto back = lumen::load_lightfield(dir);
  EXPECT_EQ(back, lumen::quantize16(lf));
  EXPECT_EQ(back.valid_flags(), valid);
  EXPECT_EQ(back.kappa_k(), 1.25);
  EXPECT_EQ(back.center(), (lumen::ViewIndex{1, 1}));
  // A second cycle is exact.
  lumen::save_lightfield(back, dir);
  EXPECT_EQ(lumen::load_lightfield(dir), back);
}

TEST(LightFieldDirectory, MissingViewIsNamed) {
  oracle::Rng rng(3);
  const auto dir = scratch("missing");
  lumen::save_lightfield(sample_lf(rng, 3, 3, {1, 1}, 1.0, std::vector<bool>(9, true)), dir);
  fs::remove(dir / "view_2_0.png");
  try {
    lumen::load_lightfield(dir);
    FAIL();
  } catch (const lumen::LfioError& e) {
    EXPECT_EQ(e.kind(), lumen::LfioErrorKind::MissingView);
    EXPECT_NE(std::string(e.what()).find("(2,0)"), std::string::npos);
  }
}

TEST(LightFieldDirectory, DistinctErrorKinds) {
  oracle::Rng rng(4);
  const auto dir = scratch("kinds");
  try {
    lumen::load_lightfield(dir);
    FAIL();
  } catch (const lumen::LfioError& e) {
    EXPECT_EQ(e.kind(), lumen::LfioErrorKind::MissingManifest);
  }
  lumen::save_lightfield(sample_lf(rng, 2, 1, {0, 0}, 1.0, {true, true}), dir);
  lumen::write_png(lumen::view_to_png16(lumen::View(3, 3, 0.5)), dir / "view_1_0.png");
  try {
    lumen::load_lightfield(dir);
    FAIL();
  } catch (const lumen::LfioError& e) {
    EXPECT_EQ(e.kind(), lumen::LfioErrorKind::DimensionMismatch);
  }
  std::ofstream(dir / lumen::kManifestName) << "ns=2\nnt=1\ncenter_s=0\ncenter_t=0\nvalid_views=1,0\n";
  try {
    lumen::load_lightfield(dir);
    FAIL();
  } catch (const lumen::LfioError& e) {
    EXPECT_EQ(e.kind(), lumen::LfioErrorKind::CenterInvalid);
  }
  std::ofstream(dir / lumen::kManifestName) << "ns=2\nnt=1\ncenter_s=0\n";
  try {
    lumen::load_lightfield(dir);
    FAIL();
  } catch (const lumen::LfioError& e) {
    EXPECT_EQ(e.kind(), lumen::LfioErrorKind::MalformedManifest);
  }
}

TEST(Manifest, ParsesCommentsAndDefaults) {
  const auto m = lumen::parse_manifest("# header\nns = 3\nnt=2 # trailing\n\ncenter_s=1\ncenter_t=0\n");
  EXPECT_EQ(m.ns, 3);
  EXPECT_EQ(m.nt, 2);
  EXPECT_EQ(m.kappa_k, 1.0);
  EXPECT_FALSE(m.valid_views.has_value());
  EXPECT_EQ(m.file_for({2, 1}), "view_2_1.png");
  EXPECT_THROW(lumen::parse_manifest("ns=3\nnt=2\ncenter_s=1\ncenter_t=0\nfoo=1\n"), lumen::LfioError);
  EXPECT_THROW(lumen::parse_manifest("ns=three\nnt=2\ncenter_s=1\ncenter_t=0\n"), lumen::LfioError);
  const auto again = lumen::parse_manifest(lumen::format_manifest(m));
  EXPECT_EQ(again.ns, 3);
  EXPECT_EQ(again.view_pattern, m.view_pattern);
}

TEST(LightFieldDirectory, LensletGridWith193ValidViews) {
  const auto dir = scratch("lenslet");
  // Vignetted 15x15 lenslet grid: 8 views lost in each corner.
  std::vector<lumen::ViewIndex> valid;
  for (int t = 0; t < 15; ++t) {
    for (int s = 0; s < 15; ++s) {
      const int ds = std::min(s, 14 - s), dt = std::min(t, 14 - t);
      const bool corner = ds + dt < 3 || (std::min(ds, dt) == 0 && ds + dt == 3);
      if (!corner) valid.push_back({s, t});
    }
  }
  ASSERT_EQ(valid.size(), 193u);
  lumen::LightFieldManifest m;
  m.ns = m.nt = 15;
  m.center_s = m.center_t = 7;
  m.valid_views = valid;
  std::ofstream(dir / lumen::kManifestName) << lumen::format_manifest(m);
  lumen::PngImage img{4, 4, 8, std::vector<std::uint16_t>(48, 200)};
  for (auto v : valid) lumen::write_png(img, dir / m.file_for(v));
  const auto lf = lumen::load_lightfield(dir);
  EXPECT_EQ(lf.valid_count(), 193);
  EXPECT_FALSE(lf.is_valid({0, 0}));
  EXPECT_TRUE(lf.is_valid({7, 0}));
  EXPECT_DOUBLE_EQ(lf.center_view()[0](1, 1), 200.0 / 255.0);
}

TEST(Png, SixteenBitRoundTripAndEightBitNormalization) {
  const auto dir = scratch("png");
  lumen::PngImage img{3, 2, 16, {0, 1, 65535, 300, 40000, 7, 12, 13, 14, 65534, 2, 3, 4, 5, 6, 7, 8, 9}};
  lumen::write_png(img, dir / "a.png");
  const auto back = lumen::read_png(dir / "a.png");
  EXPECT_EQ(back.rgb, img.rgb);
  EXPECT_EQ(back.bit_depth, 16);
  lumen::PngImage low{1, 1, 8, {255, 0, 51}};
  lumen::write_png(low, dir / "b.png");
  const auto v = lumen::png_to_view(lumen::read_png(dir / "b.png"));
  EXPECT_EQ(v[0](0, 0), 1.0);
  EXPECT_EQ(v[1](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(v[2](0, 0), 0.2);
  std::ofstream(dir / "bad.png") << "not a png";
  EXPECT_THROW(lumen::read_png(dir / "bad.png"), lumen::DataError);
}

TEST(Colormap, TableIsVersionedViridis) {
  EXPECT_EQ(lumen::kColormapVersion, 1);
  EXPECT_EQ(lumen::kColormap[0].r, 68);
  EXPECT_EQ(lumen::kColormap[0].g, 1);
  EXPECT_EQ(lumen::kColormap[0].b, 84);
  EXPECT_EQ(lumen::kColormap[255].r, 253);
  EXPECT_EQ(lumen::kColormap[255].g, 231);
  EXPECT_EQ(lumen::kColormap[255].b, 37);
}

TEST(Colormap, DegenerateEndpointsAndRamp) {
  for (auto i : lumen::colormap_indices(Image(3, 3, 0.7), std::nullopt).values()) EXPECT_EQ(i, 128);
  Image two(2, 1);
  two(0, 0) = -1.0;
  two(1, 0) = 3.0;
  const auto ends = lumen::colormap_indices(two, std::nullopt);
  EXPECT_EQ(ends(0, 0), 0);
  EXPECT_EQ(ends(1, 0), 255);
  Image ramp(300, 1);
  for (int x = 0; x < 300; ++x) ramp(x, 0) = 0.01 * x;
  const auto idx = lumen::colormap_indices(ramp, std::pair{0.5, 2.5});
  for (int x = 0; x < 300; ++x) {
    const double u = std::clamp((0.01 * x - 0.5) / 2.0, 0.0, 1.0);
    EXPECT_EQ(idx(x, 0), static_cast<int>(std::lround(255 * u)));
    if (x) {
      EXPECT_GE(idx(x, 0), idx(x - 1, 0));
    }
  }
  EXPECT_THROW(lumen::colormap_indices(ramp, std::pair{1.0, 1.0}), lumen::ContractError);
}

TEST(Colormap, RenderedPngUsesTable) {
  const auto dir = scratch("render");
  Image f(2, 1);
  f(0, 0) = 0.0;
  f(1, 0) = 1.0;
  lumen::render_disparity_png(f, std::nullopt, dir / "d.png");
  const auto img = lumen::read_png(dir / "d.png");
  EXPECT_EQ(img.bit_depth, 8);
  EXPECT_EQ(img.rgb, (std::vector<std::uint16_t>{68, 1, 84, 253, 231, 37}));
}

}  // namespace
