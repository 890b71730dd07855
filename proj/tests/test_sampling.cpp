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

#include <gtest/gtest.h>

#include <cmath>

#include "vcool/sampling.hpp"

namespace vcool {
namespace {

TEST(SampleCategorical, FrequenciesAndDeterminism) {
  RealVector w(3);
  w << 0.2, 0.5, 0.3;
  SamplingOptions o;
  o.shots = 200000;
  o.seed = 12;
  o.workers = 4;
  const auto a = sample_categorical(w, o);
  EXPECT_EQ(a, sample_categorical(w, o));
  ASSERT_EQ(a.size(), o.shots);
  std::vector<double> counts(3, 0.0);
  for (std::size_t k : a) counts[k] += 1.0;
  for (int k = 0; k < 3; ++k) {
    const double p = w(k);
    EXPECT_NEAR(counts[std::size_t(k)] / double(o.shots), p, 5 * std::sqrt(p * (1 - p) / double(o.shots)));
  }
}

TEST(SampleCategorical, Rejects) {
  RealVector w(2);
  w << 0.5, -0.1;
  SamplingOptions o;
  o.shots = 10;
  EXPECT_THROW(sample_categorical(w, o), std::invalid_argument);
  o.shots = 0;
  w << 0.5, 0.5;
  EXPECT_THROW(sample_categorical(w, o), std::invalid_argument);
}

TEST(RatioEstimate, ExactForConstantPhase) {
  RealVector x(2);
  x << 1.0, 3.0;
  Vector r = Vector::Ones(2);
  const EstimateReport e = ratio_estimate({0, 1, 1, 0}, x, r);
  EXPECT_DOUBLE_EQ(e.ratio, 2.0);
  EXPECT_DOUBLE_EQ(e.denominator, 1.0);
  EXPECT_EQ(e.denominator_se, 0.0);
  EXPECT_EQ(e.shots, 4u);
}

TEST(RatioEstimate, SignedPhases) {
  RealVector x(2);
  x << 2.0, 1.0;
  Vector r(2);
  r << 1.0, -1.0;
  // Outcomes 0,0,0,1: numerator mean (2+2+2-1)/4, denominator (1+1+1-1)/4.
  const EstimateReport e = ratio_estimate({0, 0, 0, 1}, x, r);
  EXPECT_DOUBLE_EQ(e.numerator, 1.25);
  EXPECT_DOUBLE_EQ(e.denominator, 0.5);
  EXPECT_DOUBLE_EQ(e.ratio, 2.5);
  EXPECT_GT(e.ratio_se, 0.0);
}

TEST(Report, CsvAndJson) {
  EstimateReport e;
  e.observable = "n_0";
  e.shots = 10;
  e.seed = 3;
  EXPECT_EQ(EstimateReport::csv_header(),
            "observable,n,beta,shots,seed,numerator,numerator_se,denominator,denominator_se,ratio,ratio_se");
  const std::string row = e.csv_row();
  EXPECT_EQ(row.rfind("n_0,2,nan,10,3,", 0), 0u);
  EXPECT_TRUE(e.to_json()["beta"].is_null());
  EXPECT_EQ(format_number(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(std::stod(format_number(M_PI)), M_PI);
}

}  // namespace
}  // namespace vcool
