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

#include "vcool/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <thread>

namespace vcool {

std::vector<std::size_t> sample_categorical(const RealVector& weights,
                                            const SamplingOptions& options) {
  if (options.shots == 0) throw std::invalid_argument("shots must be positive");
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (weights.size() == 0) throw std::invalid_argument("empty distribution");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("negative or NaN probability weight");
  }
  // Tiny negative round-off from quadratic forms is clipped by the caller;
  // std::discrete_distribution normalizes.
  const std::vector<double> w(weights.data(), weights.data() + weights.size());

  const auto workers = static_cast<std::size_t>(options.workers);
  std::vector<std::size_t> out(options.shots);
  std::vector<std::thread> pool;
  const std::size_t base = options.shots / workers;
  const std::size_t extra = options.shots % workers;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < workers; ++k) {
    const std::size_t count = base + (k < extra ? 1 : 0);
    pool.emplace_back([&, k, begin, count] {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(k)};
      std::mt19937_64 rng(seq);
      std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
      for (std::size_t s = 0; s < count; ++s) out[begin + s] = dist(rng);
    });
    begin += count;
  }
  for (auto& t : pool) t.join();
  return out;
}

EstimateReport ratio_estimate(const std::vector<std::size_t>& outcomes, const RealVector& x,
                              const Vector& r) {
  if (outcomes.empty()) throw std::invalid_argument("no shots");
  if (x.size() != r.size()) throw std::invalid_argument("x and r sizes differ");
  const double m = static_cast<double>(outcomes.size());

  // Accumulate in outcome order; the order is fixed by the sampler.
  Complex sum_num{0.0, 0.0}, sum_den{0.0, 0.0};
  for (std::size_t k : outcomes) {
    sum_num += x[static_cast<Eigen::Index>(k)] * r[static_cast<Eigen::Index>(k)];
    sum_den += r[static_cast<Eigen::Index>(k)];
  }
  const Complex num = sum_num / m;
  const Complex den = sum_den / m;
  if (std::abs(den) == 0.0) throw std::runtime_error("sampled denominator is exactly zero");
  const Complex q = num / den;

  // Real-part variances of the numerator and denominator samples and of the
  // linearized ratio z = (x r - q r) / den.
  double vn_re = 0, vd_re = 0, vz_re = 0, vz_im = 0;
  for (std::size_t k : outcomes) {
    const auto i = static_cast<Eigen::Index>(k);
    const Complex a = x[i] * r[i] - num;
    const Complex b = r[i] - den;
    const Complex z = (x[i] * r[i] - q * r[i]) / den;
    vn_re += a.real() * a.real();
    vd_re += b.real() * b.real();
    vz_re += z.real() * z.real();
    vz_im += z.imag() * z.imag();
  }
  const double dof = m > 1 ? m - 1 : 1;
  auto se = [&](double v) { return std::sqrt(v / dof / m); };

  EstimateReport rep;
  rep.shots = outcomes.size();
  rep.numerator = num.real();
  rep.numerator_imag = num.imag();
  rep.numerator_se = se(vn_re);
  rep.denominator = den.real();
  rep.denominator_imag = den.imag();
  rep.denominator_se = se(vd_re);
  rep.ratio = q.real();
  rep.ratio_imag = q.imag();
  rep.ratio_se = se(vz_re);
  rep.ratio_imag_se = se(vz_im);
  return rep;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j;
  j["observable"] = observable;
  j["n"] = n;
  if (std::isnan(beta)) {
    j["beta"] = nullptr;
  } else {
    j["beta"] = beta;
  }
  j["shots"] = shots;
  j["seed"] = seed;
  j["workers"] = workers;
  j["numerator"] = numerator;
  j["numerator_se"] = numerator_se;
  j["denominator"] = denominator;
  j["denominator_se"] = denominator_se;
  j["ratio"] = ratio;
  j["ratio_se"] = ratio_se;
  j["ratio_imag"] = ratio_imag;
  j["ratio_imag_se"] = ratio_imag_se;
  return j;
}

std::string EstimateReport::csv_header() {
  return "observable,n,beta,shots,seed,numerator,numerator_se,denominator,denominator_se,ratio,"
         "ratio_se";
}

std::string EstimateReport::csv_row() const {
  std::string row = observable + "," + std::to_string(n) + "," +
                    (std::isnan(beta) ? std::string("nan") : format_number(beta)) + "," +
                    std::to_string(shots) + "," + std::to_string(seed);
  for (double v : {numerator, numerator_se, denominator, denominator_se, ratio, ratio_se}) {
    row += "," + format_number(v);
  }
  return row;
}

}  // namespace vcool
