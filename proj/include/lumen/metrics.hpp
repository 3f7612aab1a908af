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

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lumen/grid.hpp"

namespace lumen {

/// Bad-pixel statistics of an estimate against ground truth. Pixels whose
/// ground truth magnitude is below the exclusion floor are not evaluated.
struct ErrorReport {
  double bad_pixel_fraction = 0.0;
  double threshold = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t evaluated_pixels = 0;
  std::size_t excluded_pixels = 0;
};

/// Pairwise (cascade) summation; the result depends only on the input order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline ErrorReport relative_error_report(const Image& est, const Image& gt, double threshold,
                                         double exclusion_floor = 1e-6) {
  require_same_shape(est, gt, "relative_error_report");
  if (!(threshold > 0.0)) throw ContractError("relative_error_report: threshold must be positive");
  ErrorReport r;
  r.threshold = threshold;
  std::vector<double> abs_err;
  std::vector<double> sq_err;
  abs_err.reserve(est.size());
  sq_err.reserve(est.size());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double g = gt.values()[i];
    if (std::abs(g) < exclusion_floor) {
      ++r.excluded_pixels;
      continue;
    }
    const double d = std::abs(est.values()[i] - g);
    if (d / std::abs(g) > threshold) ++bad;
    abs_err.push_back(d);
    sq_err.push_back(d * d);
  }
  r.evaluated_pixels = abs_err.size();
  if (r.evaluated_pixels > 0) {
    const double n = static_cast<double>(r.evaluated_pixels);
    r.bad_pixel_fraction = static_cast<double>(bad) / n;
    r.mae = pairwise_sum(abs_err) / n;
    r.rmse = std::sqrt(pairwise_sum(sq_err) / n);
  }
  return r;
}

/// Fraction of pixels selected by `mask` whose absolute error exceeds `threshold`.
inline double absolute_bad_fraction(const Image& est, const Image& gt, double threshold, const Mask& mask) {
  require_same_shape(est, gt, "absolute_bad_fraction");
  require_same_shape(est, mask, "absolute_bad_fraction mask");
  std::size_t n = 0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (!mask.values()[i]) continue;
    ++n;
    if (std::abs(est.values()[i] - gt.values()[i]) > threshold) ++bad;
  }
  return n ? static_cast<double>(bad) / static_cast<double>(n) : 0.0;
}

/// Flat key=value block, one field per line.
inline std::string to_key_value(const ErrorReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "bad_pixel_fraction=" << r.bad_pixel_fraction << "\n"
      << "threshold=" << r.threshold << "\n"
      << "mae=" << r.mae << "\n"
      << "rmse=" << r.rmse << "\n"
      << "evaluated_pixels=" << r.evaluated_pixels << "\n"
      << "excluded_pixels=" << r.excluded_pixels << "\n";
  return out.str();
}

}  // namespace lumen
