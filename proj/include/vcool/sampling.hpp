// Copyright 2026 The vcool Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VCOOL_SAMPLING_HPP
#define VCOOL_SAMPLING_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcool/linalg.hpp"

namespace vcool {

struct SamplingOptions {
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  // Shots are split over this many independent streams; the outcome list is
  // reproducible for a fixed (seed, workers) pair.
  int workers = 1;
};

// Draws outcome indices from a categorical distribution (weights need not
// be normalized). Worker w draws with std::mt19937_64 seeded from
// std::seed_seq{seed_lo, seed_hi, w}; results are concatenated in worker order.
std::vector<std::size_t> sample_categorical(const RealVector& weights,
                                            const SamplingOptions& options);

// Ratio-of-means estimate  mean(x r) / mean(r)  with first-order
// (delta-method) standard errors from the same shots.
struct EstimateReport {
  std::string observable;
  int n = 2;
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  int workers = 1;

  double numerator = 0.0;
  double numerator_se = 0.0;
  double denominator = 0.0;
  double denominator_se = 0.0;
  double ratio = 0.0;
  double ratio_se = 0.0;

  // Imaginary parts; identically zero for real phases (n = 2, fermions).
  double numerator_imag = 0.0;
  double denominator_imag = 0.0;
  double ratio_imag = 0.0;
  double ratio_imag_se = 0.0;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

// x and r are per-outcome values, indexed like the sampled outcomes.
EstimateReport ratio_estimate(const std::vector<std::size_t>& outcomes, const RealVector& x,
                              const Vector& r);

// 17 significant digits, scientific; used for every CSV number.
std::string format_number(double v);

}  // namespace vcool

#endif  // VCOOL_SAMPLING_HPP
