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

#include "units/vocabulary.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "utils/string_util.h"

namespace unitvc {

namespace {

// Squared distances [points, centroids].
RealMatrix SquaredDistances(const RealMatrix& x, const RealMatrix& c) {
  const Eigen::VectorXd xn = x.rowwise().squaredNorm();
  const Eigen::RowVectorXd cn = c.rowwise().squaredNorm().transpose();
  RealMatrix d = -2.0 * x * c.transpose();
  d.colwise() += xn;
  d.rowwise() += cn;
  return d.cwiseMax(0.0);
}

// Nearest centroid per point; ties resolve to the lowest index.
std::vector<int> Nearest(const RealMatrix& d, std::vector<double>* best) {
  std::vector<int> out(d.rows());
  if (best) best->resize(d.rows());
  for (int i = 0; i < d.rows(); ++i) {
    int arg = 0;
    double v = d(i, 0);
    for (int j = 1; j < d.cols(); ++j) {
      if (d(i, j) < v) {
        v = d(i, j);
        arg = j;
      }
    }
    out[i] = arg;
    if (best) (*best)[i] = v;
  }
  return out;
}

size_t CountDistinctRows(const RealMatrix& x) {
  std::set<std::vector<double>> rows;
  for (int i = 0; i < x.rows(); ++i) {
    rows.emplace(x.row(i).data(), x.row(i).data() + x.cols());
  }
  return rows.size();
}

}  // namespace

RealMatrix MelWithDeltas(const MelSpectrogram& mel) {
  const RealMatrix& m = mel.frames;
  const int n = static_cast<int>(m.rows()), d = static_cast<int>(m.cols());
  RealMatrix out(n, 2 * d);
  out.leftCols(d) = m;
  for (int i = 0; i < n; ++i) {
    const int prev = std::max(0, i - 1), next = std::min(n - 1, i + 1);
    out.row(i).rightCols(d) = 0.5 * (m.row(next) - m.row(prev));
  }
  return out;
}

UnitVocabulary::UnitVocabulary(RealMatrix centroids, Eigen::RowVectorXd mean,
                               Eigen::RowVectorXd scale)
    : centroids_(std::move(centroids)),
      mean_(std::move(mean)),
      scale_(std::move(scale)) {
  if (mean_.size() != centroids_.cols() || scale_.size() != centroids_.cols()) {
    throw std::invalid_argument("vocabulary statistics do not match centroids");
  }
}

RealMatrix UnitVocabulary::Standardize(const RealMatrix& descriptors) const {
  if (descriptors.cols() != mean_.size()) {
    throw std::invalid_argument("descriptor width " +
                                std::to_string(descriptors.cols()) +
                                " does not match vocabulary width " +
                                std::to_string(mean_.size()));
  }
  RealMatrix out = descriptors.rowwise() - mean_;
  out.array().rowwise() /= scale_.array();
  return out;
}

std::vector<int> UnitVocabulary::Assign(const RealMatrix& standardized) const {
  if (!fitted()) throw std::logic_error("vocabulary not fitted");
  return Nearest(SquaredDistances(standardized, centroids_), nullptr);
}

std::vector<int> UnitVocabulary::Quantize(const MelSpectrogram& mel) const {
  if (!fitted()) throw std::logic_error("vocabulary not fitted");
  return Assign(Standardize(MelWithDeltas(mel)));
}

std::vector<int> UnitVocabulary::Quantize(const Waveform& wave,
                                          const FeatureConfig& cfg) const {
  if (!fitted()) throw std::logic_error("vocabulary not fitted");
  return Quantize(ComputeMelSpectrogram(wave, cfg));
}

void UnitVocabulary::WriteTo(Archive* archive,
                             const std::string& prefix) const {
  archive->PutInts(prefix + "format_version", {1}, {kFormatVersion});
  archive->PutDoubles(
      prefix + "centroids",
      {static_cast<uint64_t>(centroids_.rows()),
       static_cast<uint64_t>(centroids_.cols())},
      std::vector<double>(centroids_.data(),
                          centroids_.data() + centroids_.size()));
  archive->PutDoubles(prefix + "mean", {static_cast<uint64_t>(mean_.size())},
                      std::vector<double>(mean_.data(), mean_.data() + mean_.size()));
  archive->PutDoubles(
      prefix + "scale", {static_cast<uint64_t>(scale_.size())},
      std::vector<double>(scale_.data(), scale_.data() + scale_.size()));
}

UnitVocabulary UnitVocabulary::ReadFrom(const Archive& archive,
                                        const std::string& prefix) {
  const auto& version = archive.GetInts(prefix + "format_version");
  if (version.size() != 1 || version[0] != kFormatVersion) {
    throw std::runtime_error("unsupported vocabulary format version");
  }
  const auto& entry = archive.Get(prefix + "centroids");
  if (entry.dims.size() != 2) throw std::runtime_error("bad centroid matrix");
  RealMatrix c(entry.dims[0], entry.dims[1]);
  std::copy(entry.doubles.begin(), entry.doubles.end(), c.data());
  const auto& mean = archive.GetDoubles(prefix + "mean");
  const auto& scale = archive.GetDoubles(prefix + "scale");
  Eigen::RowVectorXd m(mean.size()), s(scale.size());
  std::copy(mean.begin(), mean.end(), m.data());
  std::copy(scale.begin(), scale.end(), s.data());
  return UnitVocabulary(std::move(c), std::move(m), std::move(s));
}

void UnitVocabulary::Save(const std::string& path) const {
  Archive a;
  WriteTo(&a, "");
  a.Save(path);
}

UnitVocabulary UnitVocabulary::Load(const std::string& path) {
  return ReadFrom(Archive::Load(path), "");
}

uint64_t UnitVocabulary::Hash() const {
  Archive a;
  WriteTo(&a, "");
  return Fnv1a64(a.Serialize());
}

namespace {

RealMatrix KMeansOnce(const RealMatrix& points, int k, std::mt19937_64& rng,
                      int max_iterations) {
  const int n = static_cast<int>(points.rows());
  RealMatrix centroids(k, points.cols());

  // Greedy k-means++ seeding: each step samples a few candidates by squared
  // distance and keeps the one that lowers the total potential most.
  std::uniform_int_distribution<int> pick(0, n - 1);
  centroids.row(0) = points.row(pick(rng));
  std::vector<double> dist(n);
  for (int i = 0; i < n; ++i) {
    dist[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  }
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> trial_dist(n), best_dist(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : dist) total += d;
    int chosen = -1;
    if (total <= 0.0) {
      // Only duplicates of existing centroids remain; take any distinct point.
      for (int i = 0; i < n && chosen < 0; ++i) {
        if (dist[i] > 0.0) chosen = i;
      }
      if (chosen < 0) chosen = 0;
      best_dist = dist;
    } else {
      double best_potential = std::numeric_limits<double>::infinity();
      for (int t = 0; t < trials; ++t) {
        double target = unit(rng) * total;
        int candidate = -1;
        for (int i = 0; i < n; ++i) {
          if (dist[i] <= 0.0) continue;
          candidate = i;
          target -= dist[i];
          if (target <= 0.0) break;
        }
        double potential = 0.0;
        for (int i = 0; i < n; ++i) {
          trial_dist[i] = std::min(
              dist[i], (points.row(i) - points.row(candidate)).squaredNorm());
          potential += trial_dist[i];
        }
        if (potential < best_potential) {
          best_potential = potential;
          chosen = candidate;
          best_dist = trial_dist;
        }
      }
    }
    centroids.row(c) = points.row(chosen);
    dist = best_dist;
  }

  std::vector<int> assign;
  std::vector<double> best;
  auto reseed_empty = [&](std::vector<int>* a) {
    // Moves the worst-served point of a multi-member cluster into each empty
    // cluster. Returns true when anything changed.
    bool changed = false;
    for (int pass = 0; pass < k; ++pass) {
      std::vector<int> counts(k, 0);
      for (int c : *a) ++counts[c];
      int empty = -1;
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) {
          empty = c;
          break;
        }
      }
      if (empty < 0) return changed;
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[(*a)[i]] > 1 && best[i] > worst_d) {
          worst_d = best[i];
          worst = i;
        }
      }
      centroids.row(empty) = points.row(worst);
      (*a)[worst] = empty;
      best[worst] = 0.0;
      changed = true;
    }
    return changed;
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<int> next = Nearest(SquaredDistances(points, centroids), &best);
    reseed_empty(&next);
    const bool converged = next == assign;
    assign = std::move(next);
    RealMatrix sums = RealMatrix::Zero(k, points.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += points.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) centroids.row(c) = sums.row(c) / counts[c];
    }
    if (converged) break;
  }
  // Final guarantee: every centroid owns a point under nearest assignment.
  for (int guard = 0; guard < 4 * k; ++guard) {
    std::vector<int> a = Nearest(SquaredDistances(points, centroids), &best);
    if (!reseed_empty(&a)) break;
  }
  return centroids;
}

double Inertia(const RealMatrix& points, const RealMatrix& centroids) {
  std::vector<double> best;
  Nearest(SquaredDistances(points, centroids), &best);
  double total = 0.0;
  for (double d : best) total += d;
  return total;
}

}  // namespace

RealMatrix KMeans(const RealMatrix& points, int k, uint64_t seed,
                  int max_iterations, int restarts) {
  const int n = static_cast<int>(points.rows());
  if (k < 2) throw std::invalid_argument("vocabulary size must be >= 2");
  if (n < k || CountDistinctRows(points) < static_cast<size_t>(k)) {
    throw std::invalid_argument("insufficient data: fewer distinct frames than "
                                "clusters");
  }
  std::mt19937_64 rng(seed);
  RealMatrix best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    RealMatrix c = KMeansOnce(points, k, rng, max_iterations);
    const double inertia = Inertia(points, c);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(c);
    }
  }
  return best;
}

UnitVocabulary FitVocabularyFromMels(const std::vector<MelSpectrogram>& mels,
                                     int size, uint64_t seed,
                                     int max_iterations) {
  if (size < 2) throw std::invalid_argument("vocabulary size must be >= 2");
  int64_t frames = 0;
  int width = 0;
  for (const auto& m : mels) {
    frames += m.num_frames();
    width = 2 * m.num_bands();
  }
  if (frames < 10LL * size) {
    throw std::invalid_argument(
        "insufficient data: " + std::to_string(frames) + " frames for " +
        std::to_string(size) + " units (need at least " +
        std::to_string(10LL * size) + ")");
  }
  RealMatrix all(frames, width);
  int64_t row = 0;
  for (const auto& m : mels) {
    const RealMatrix d = MelWithDeltas(m);
    all.middleRows(row, d.rows()) = d;
    row += d.rows();
  }
  const Eigen::RowVectorXd mean = all.colwise().mean();
  Eigen::RowVectorXd scale =
      ((all.rowwise() - mean).array().square().colwise().mean()).sqrt();
  for (int j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 1e-8)) scale[j] = 1.0;
  }
  RealMatrix standardized = all.rowwise() - mean;
  standardized.array().rowwise() /= scale.array();
  RealMatrix centroids = KMeans(standardized, size, seed, max_iterations);
  return UnitVocabulary(std::move(centroids), mean, scale);
}

UnitVocabulary FitVocabulary(const std::vector<Waveform>& corpus, int size,
                             uint64_t seed, const FeatureConfig& cfg,
                             int max_iterations) {
  std::vector<MelSpectrogram> mels;
  mels.reserve(corpus.size());
  for (const Waveform& w : corpus) mels.push_back(ComputeMelSpectrogram(w, cfg));
  return FitVocabularyFromMels(mels, size, seed, max_iterations);
}

std::vector<int> ParseUnitsFile(const std::string& text, int num_frames,
                                int vocabulary_size) {
  std::istringstream is(text);
  std::string token;
  double hop = 0.0;
  std::vector<int> ids;
  while (is >> token) {
    if (token == "hop_seconds") {
      if (!(is >> hop)) throw std::runtime_error("bad hop_seconds in units file");
      continue;
    }
    size_t pos = 0;
    const int id = std::stoi(token, &pos);
    if (pos != token.size() || id < 0 || id >= vocabulary_size) {
      throw std::runtime_error("unit id '" + token + "' outside [0, " +
                               std::to_string(vocabulary_size) + ")");
    }
    ids.push_back(id);
  }
  if (!(hop > 0.0)) throw std::runtime_error("units file lacks hop_seconds");
  if (ids.empty()) throw std::runtime_error("units file has no units");
  return NearestResample(ids, num_frames);
}

std::string FormatUnitsFile(const std::vector<int>& frames,
                            double hop_seconds) {
  std::ostringstream os;
  os << "hop_seconds " << FormatDouble(hop_seconds) << "\n";
  for (size_t i = 0; i < frames.size(); ++i) {
    os << frames[i] << (i + 1 == frames.size() ? "\n" : " ");
  }
  return os.str();
}

}  // namespace unitvc
