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

#include "eval/metrics.h"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "frontend/features.h"
#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

namespace {

std::optional<double> MeanOf(const std::vector<PairMetrics>& pairs,
                             MetricValue PairMetrics::*field) {
  double sum = 0.0;
  int n = 0;
  for (const auto& p : pairs) {
    if ((p.*field).valid()) {
      sum += *(p.*field).value;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

nlohmann::json ToJsonValue(const MetricValue& m) {
  if (m.valid()) return *m.value;
  if (m.skip_reason.empty()) return nullptr;
  return nlohmann::json{{"skipped", m.skip_reason}};
}

std::string Show(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string("n/a");
}

}  // namespace

MetricValue Pcc(const std::vector<double>& a, const std::vector<double>& b) {
  MetricValue out;
  if (a.size() < 2 || b.empty()) {
    out.skip_reason = kSkipTooShort;
    return out;
  }
  const std::vector<double> bb =
      b.size() == a.size() ? b : NearestResample(b, a.size());
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += bb[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = bb[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    out.skip_reason = kSkipZeroVariance;
    return out;
  }
  out.value = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return out;
}

ProsodyPcc ComputeProsodyPcc(const UtteranceFeatures& target,
                             const UtteranceFeatures& converted) {
  ProsodyPcc out;
  const size_t n = target.pitch.pitch.size();
  const auto conv_pitch = NearestResample(converted.pitch.pitch, n);
  const auto conv_voicing = NearestResample(converted.pitch.voicing, n);
  std::vector<double> a, b;
  for (size_t j = 0; j < n && !converted.pitch.pitch.empty(); ++j) {
    if (!target.pitch.voicing[j] || !conv_voicing[j]) continue;
    const double fa = target.pitch.pitch[j] + target.pitch.mean_f0;
    const double fb = conv_pitch[j] + converted.pitch.mean_f0;
    if (fa <= 0.0 || fb <= 0.0) continue;
    a.push_back(std::log(fa));
    b.push_back(std::log(fb));
  }
  if (a.size() < 2) {
    out.log_f0.skip_reason = kSkipFewVoiced;
  } else {
    out.log_f0 = Pcc(a, b);
  }
  out.energy = Pcc(target.energy.energy, converted.energy.energy);
  return out;
}

double EmbeddingCosine(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("embedding dimensions differ");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("zero-norm vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::map<std::string, std::vector<double>> ParseEmbeddingFile(
    const std::string& text) {
  std::map<std::string, std::vector<double>> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto fields = SplitWhitespace(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    std::vector<double> v;
    for (size_t i = 1; i < fields.size(); ++i) v.push_back(std::stod(fields[i]));
    out[fields[0]] = std::move(v);
  }
  return out;
}

std::optional<double> MetricReport::MeanLogF0() const {
  return MeanOf(pairs, &PairMetrics::pcc_log_f0);
}
std::optional<double> MetricReport::MeanEnergy() const {
  return MeanOf(pairs, &PairMetrics::pcc_energy);
}
std::optional<double> MetricReport::MeanCosine() const {
  return MeanOf(pairs, &PairMetrics::cosine);
}

std::map<std::string, int> MetricReport::SkipCounts() const {
  std::map<std::string, int> counts;
  for (const auto& p : pairs) {
    if (!p.error.empty()) {
      ++counts[kSkipUnreadable];
      continue;
    }
    for (const MetricValue* m : {&p.pcc_log_f0, &p.pcc_energy, &p.cosine}) {
      if (!m->valid() && !m->skip_reason.empty()) ++counts[m->skip_reason];
    }
  }
  return counts;
}

std::string MetricReport::ToJson() const {
  nlohmann::ordered_json j;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::ordered_json row;
    row["name"] = p.name;
    if (!p.error.empty()) {
      row["error"] = p.error;
    } else {
      row["pcc_log_f0"] = ToJsonValue(p.pcc_log_f0);
      row["pcc_energy"] = ToJsonValue(p.pcc_energy);
      if (p.cosine.valid() || !p.cosine.skip_reason.empty()) {
        row["cosine_similarity"] = ToJsonValue(p.cosine);
      }
    }
    j["pairs"].push_back(row);
  }
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j["aggregate"] = {{"pcc_log_f0", opt(MeanLogF0())},
                    {"pcc_energy", opt(MeanEnergy())},
                    {"cosine_similarity", opt(MeanCosine())}};
  j["skipped"] = SkipCounts();
  return j.dump(2) + "\n";
}

std::string MetricReport::Summary() const {
  std::ostringstream os;
  int evaluated = 0;
  for (const auto& p : pairs) evaluated += p.error.empty() ? 1 : 0;
  os << "pairs: " << pairs.size() << " (evaluated " << evaluated << ")\n"
     << "mean pcc log f0: " << Show(MeanLogF0()) << "\n"
     << "mean pcc energy: " << Show(MeanEnergy()) << "\n"
     << "mean cosine: " << Show(MeanCosine()) << "\n";
  for (const auto& [reason, count] : SkipCounts()) {
    os << "skipped (" << reason << "): " << count << "\n";
  }
  return os.str();
}

MetricReport EvaluatePairs(const std::string& manifest_path,
                           const SystemConfig& cfg,
                           const std::string& embeddings_path) {
  std::map<std::string, std::vector<double>> embeddings;
  if (!embeddings_path.empty()) {
    embeddings = ParseEmbeddingFile(ReadFileBytes(embeddings_path));
  }
  const std::string base = fs::path(manifest_path).parent_path().string();
  MetricReport report;
  const auto rows = ReadTable(manifest_path);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    PairMetrics p;
    p.name = row.size() > 2 ? row[2] : "pair" + std::to_string(i);
    try {
      if (row.size() < 2) {
        throw std::invalid_argument("expected '<target> <converted> [name]'");
      }
      const std::string tp = ResolvePath(row[0], base);
      const std::string cp = ResolvePath(row[1], base);
      auto prosody = [&](const std::string& path) {
        const Waveform w = LoadWaveform(path, cfg.feature.sample_rate);
        CheckAnalyzable(w, cfg.feature);
        UtteranceFeatures u;
        u.pitch = MeanNormalizePitch(EstimatePitch(w, cfg.feature), cfg.feature);
        u.energy = ComputeEnergyContour(w, cfg.feature);
        return u;
      };
      const UtteranceFeatures target = prosody(tp);
      const UtteranceFeatures converted = prosody(cp);
      const ProsodyPcc pcc = ComputeProsodyPcc(target, converted);
      p.pcc_log_f0 = pcc.log_f0;
      p.pcc_energy = pcc.energy;
      if (!embeddings.empty()) {
        auto a = embeddings.find(FileStem(tp));
        auto b = embeddings.find(FileStem(cp));
        if (a == embeddings.end() || b == embeddings.end()) {
          p.cosine.skip_reason = "missing embedding";
        } else {
          try {
            p.cosine.value = EmbeddingCosine(a->second, b->second);
          } catch (const std::invalid_argument& e) {
            p.cosine.skip_reason = e.what();
          }
        }
      }
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    report.pairs.push_back(std::move(p));
  }
  return report;
}

std::string ExportAttributeEmbeddings(const std::vector<ManifestEntry>& entries,
                                      AttributeKind kind,
                                      const ModelState& state) {
  ag::NoGradGuard no_grad;
  std::ostringstream os;
  for (const auto& e : entries) {
    const Waveform w = LoadWaveform(e.path, state.config().feature.sample_rate);
    const AttributeVector a = state.EncodeAttribute(kind, w);
    os << e.id << "\t" << (e.label.empty() ? "-" : e.label);
    for (double v : a.values.values()) os << "\t" << FormatDouble(v);
    os << "\n";
  }
  return os.str();
}

}  // namespace unitvc
