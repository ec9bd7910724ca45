// Copyright (c) 2026 The unitvc Authors
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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "autograd/ops.h"
#include "bins/bins.h"
#include "config/system_config.h"

namespace unitvc {
namespace {

using ag::Tensor;

BinGrid PitchGrid() { return BinGrid(SystemConfig().pitch_grid); }

Tensor Weights(const std::vector<std::vector<double>>& rows) {
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Tensor::FromVector(
      {static_cast<int64_t>(rows.size()),
       static_cast<int64_t>(rows.front().size())},
      flat);
}

Tensor RandomTable(int count, int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(count * dim);
  for (double& x : v) x = d(rng);
  return Tensor::FromVector({count, dim}, v, true);
}

TEST(BinGridTest, PitchGridEndpoints) {
  BinGrid g = PitchGrid();
  EXPECT_EQ(g.count(), 200);
  EXPECT_DOUBLE_EQ(g.FirstCenter(), -247.5);
  EXPECT_DOUBLE_EQ(g.LastCenter(), 250.0);
  EXPECT_DOUBLE_EQ(g.sigma(), 4.0);
}

TEST(BinGridTest, EnergyGridDefaults) {
  BinGrid g(SystemConfig().energy_grid);
  EXPECT_DOUBLE_EQ(g.FirstCenter(), 1.0);
  EXPECT_DOUBLE_EQ(g.LastCenter(), 200.0);
  EXPECT_DOUBLE_EQ(g.Clamp(1e6), 200.0);
  EXPECT_DOUBLE_EQ(g.Clamp(-3.0), 1.0);
}

TEST(BinGridTest, RejectsBadGeometry) {
  EXPECT_THROW(BinGrid(0, 0.0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(BinGrid(0, 1.0, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(BinGrid(0, 1.0, 10, 0.0), std::invalid_argument);
}

TEST(GaussianWeightsTest, CenterAndSigma) {
  BinGrid g = PitchGrid();
  const int i = 57;
  RealMatrix w = GaussianBinWeights({g.Center(i), g.Center(i) + g.sigma()}, g);
  EXPECT_NEAR(w(0, i), 1.0, 1e-12);
  EXPECT_NEAR(w(1, i), 0.6065306597126334, 1e-9);
}

TEST(GaussianWeightsTest, Symmetry) {
  BinGrid g = PitchGrid();
  const int i = 100;
  const double d = 3.3;
  RealMatrix w = GaussianBinWeights({g.Center(i) - d, g.Center(i) + d}, g);
  EXPECT_NEAR(w(0, i), w(1, i), 1e-15);
  // Mirror bins around the center see mirrored distances.
  RealMatrix c = GaussianBinWeights({g.Center(i)}, g);
  EXPECT_NEAR(c(0, i - 2), c(0, i + 2), 1e-15);
}

TEST(GaussianWeightsTest, TranslationConsistency) {
  const double delta = 17.25;
  BinGrid g(-250.0, 2.5, 200, 4.0);
  BinGrid shifted(-250.0 + delta, 2.5, 200, 4.0);
  std::vector<double> v{-120.3, 0.0, 33.7};
  std::vector<double> vs;
  for (double x : v) vs.push_back(x + delta);
  RealMatrix a = GaussianBinWeights(v, g);
  RealMatrix b = GaussianBinWeights(vs, shifted);
  EXPECT_TRUE(a == b);
}

TEST(GaussianWeightsTest, EntriesInRangeAndNonFiniteRejected) {
  BinGrid g = PitchGrid();
  RealMatrix w = GaussianBinWeights({-30.0, 140.2}, g);
  EXPECT_GT(w.minCoeff(), -1e-300);
  EXPECT_LE(w.maxCoeff(), 1.0);
  EXPECT_THROW(GaussianBinWeights({NAN}, g), std::invalid_argument);
  EXPECT_THROW(GaussianBinWeights({INFINITY}, g), std::invalid_argument);
}

TEST(EncodeTest, OneHotAndMidpoint) {
  Tensor table = RandomTable(4, 3, 1);
  Tensor one_hot = Weights({{0, 0, 1, 0}});
  Tensor mid = Weights({{0.3, 0, 0, 0.3}});
  Tensor e1 = EncodeWithEmbeddings(one_hot, table);
  Tensor e2 = EncodeWithEmbeddings(mid, table);
  for (int d = 0; d < 3; ++d) {
    EXPECT_EQ(e1.at(0, d), table.at(2, d));
    EXPECT_NEAR(e2.at(0, d), 0.5 * (table.at(0, d) + table.at(3, d)), 1e-15);
  }
}

TEST(EncodeTest, ConvexityBound) {
  Tensor table = RandomTable(20, 5, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows(50, std::vector<double>(20));
  for (auto& r : rows) {
    for (double& x : r) x = u(rng) * u(rng);
  }
  Tensor out = EncodeWithEmbeddings(Weights(rows), table);
  for (int d = 0; d < 5; ++d) {
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 20; ++i) {
      lo = std::min(lo, table.at(i, d));
      hi = std::max(hi, table.at(i, d));
    }
    for (int n = 0; n < 50; ++n) {
      EXPECT_GE(out.at(n, d), lo - 1e-12);
      EXPECT_LE(out.at(n, d), hi + 1e-12);
    }
  }
}

TEST(EncodeTest, DegenerateRowIsRejected) {
  Tensor table = RandomTable(3, 2, 4);
  EXPECT_THROW(EncodeWithEmbeddings(Weights({{0, 0, 0}}), table),
               std::exception);
  EXPECT_THROW(EncodeWithEmbeddings(Weights({{1, 0}}), table), std::exception);
}

TEST(EncodeTest, FiniteDifferenceIntoTable) {
  // Loss = sum(w_out * Encode(bw, table)) on a 3-bin table.
  Tensor table = RandomTable(3, 2, 5);
  Tensor bw = Weights({{0.2, 0.7, 0.1}, {0.5, 0.05, 0.9}});
  Tensor probe = Weights({{0.3, -1.2}, {2.0, 0.4}});
  auto loss = [&] {
    return ag::Sum(ag::Mul(EncodeWithEmbeddings(bw, table), probe));
  };
  table.ZeroGrad();
  loss().Backward();
  const std::vector<double> analytic = table.grad();
  for (size_t k = 0; k < table.values().size(); ++k) {
    const double saved = table.values()[k];
    const double h = 1e-6;
    table.values()[k] = saved + h;
    const double up = loss().item();
    table.values()[k] = saved - h;
    const double down = loss().item();
    table.values()[k] = saved;
    const double numeric = (up - down) / (2 * h);
    EXPECT_LT(std::abs(numeric - analytic[k]) / std::max(1e-8, std::abs(numeric)),
              1e-4)
        << "entry " << k;
  }
}

TEST(VoicingTest, ReplacementSemantics) {
  BinEmbeddingTable table(4, 3, true);
  table.table() = RandomTable(4, 3, 6);
  table.unvoiced() = Tensor::FromVector({3}, {9.0, 8.0, 7.0}, true);
  Tensor encoded =
      table.Encode(Weights({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 1}}));
  Tensor same = table.ApplyVoicing(encoded, {1, 1, 1});
  EXPECT_EQ(same.values(), encoded.values());
  Tensor none = table.ApplyVoicing(encoded, {0, 0, 0});
  for (int n = 0; n < 3; ++n) {
    EXPECT_EQ(none.at(n, 0), 9.0);
    EXPECT_EQ(none.at(n, 2), 7.0);
  }
  // The unvoiced frame ignores whatever the pitch row held.
  Tensor other =
      table.Encode(Weights({{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 1}}));
  Tensor a = table.ApplyVoicing(encoded, {1, 0, 1});
  Tensor b = table.ApplyVoicing(other, {1, 0, 1});
  EXPECT_EQ(a.values(), b.values());
  EXPECT_THROW(table.ApplyVoicing(encoded, {1, 0}), std::invalid_argument);
}

TEST(DecodeTest, OneHotAndSymmetricPair) {
  BinGrid g = PitchGrid();
  RealMatrix w = RealMatrix::Zero(2, g.count());
  w(0, 10) = 1.0;
  w(1, 0) = 0.4;
  w(1, 2) = 0.4;
  std::vector<double> v = DecodeScalar(w, g);
  EXPECT_DOUBLE_EQ(v[0], g.Center(10));
  EXPECT_NEAR(v[1], g.Center(1), 1e-12);
  RealMatrix zero = RealMatrix::Zero(1, g.count());
  EXPECT_THROW(DecodeScalar(zero, g), std::domain_error);
}

TEST(DecodeTest, RoundTripAcrossInterior) {
  BinGrid g = PitchGrid();
  std::vector<double> values;
  for (double v = g.FirstCenter() + 3 * g.sigma();
       v <= g.LastCenter() - 3 * g.sigma(); v += 0.37) {
    values.push_back(v);
  }
  std::vector<double> back = DecodeScalar(GaussianBinWeights(values, g), g);
  for (size_t i = 0; i < values.size(); ++i) {
    EXPECT_LT(std::abs(back[i] - values[i]), g.width() / 2) << values[i];
  }
}

TEST(ClampTest, EnergyAboveCeilingUsesLastBin) {
  BinGrid g(SystemConfig().energy_grid);
  RealMatrix a = ClampedBinWeights({5000.0}, g);
  RealMatrix b = GaussianBinWeights({g.LastCenter()}, g);
  EXPECT_TRUE(a == b);
}

}  // namespace
}  // namespace unitvc
