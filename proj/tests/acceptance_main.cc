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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <glog/logging.h>
#include <json.hpp>

#include "autograd/ops.h"
#include "bins/bins.h"
#include "cli/commands.h"
#include "conversion/convert.h"
#include "corpus/cache.h"
#include "eval/metrics.h"
#include "frontend/synthetic.h"
#include "model/model_state.h"
#include "test_support.h"
#include "training/losses.h"
#include "training/trainer.h"
#include "units/units.h"
#include "units/vocabulary.h"
#include "utils/string_util.h"

namespace unitvc {
namespace {

namespace fs = std::filesystem;
using ag::Tensor;
using testing_support::TempDir;

// Collects failed expectations for one criterion.
class Check {
 public:
  void Expect(bool condition, const std::string& what) {
    if (!condition) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  void Note(const std::string& text) { notes_.push_back(text); }
  const std::vector<std::string>& notes() const { return notes_; }
  // Seconds excluded from the runtime budget (training time).
  double excluded_seconds = 0.0;

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string Num(double v) { return FormatDouble(v); }

SystemConfig ShippedToyConfig() {
  return SystemConfig::FromFile(std::string(UNITVC_SOURCE_DIR) +
                                "/configs/toy.conf");
}

Tensor RandomTable(int count, int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(count * dim);
  for (double& x : v) x = d(rng);
  return Tensor::FromVector({count, dim}, v, true);
}

void PerturbGroup(const ModelState& state, const std::string& group,
                  uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 0.5);
  for (const NamedParameter& p : state.AllParameters()) {
    if (ModelState::GroupOf(p.name) != group) continue;
    Tensor t = p.tensor;
    for (double& x : t.values()) x += d(rng);
  }
}

// 1. Bin encoding.
void BinEncoding(Check& c) {
  const SystemConfig cfg;
  const BinGrid grid(cfg.pitch_grid);
  c.Expect(grid.count() == 200, "pitch grid has " +
                                    std::to_string(grid.count()) + " bins");
  c.Expect(grid.FirstCenter() == -247.5,
           "first center " + Num(grid.FirstCenter()));
  c.Expect(grid.LastCenter() == 250.0, "last center " + Num(grid.LastCenter()));

  for (int i : {0, 57, 199}) {
    const RealMatrix w =
        GaussianBinWeights({grid.Center(i), grid.Center(i) - grid.sigma()}, grid);
    c.Expect(std::abs(w(0, i) - 1.0) < 1e-9, "weight at center " + Num(w(0, i)));
    c.Expect(std::abs(w(1, i) - std::exp(-0.5)) < 1e-9,
             "weight at sigma " + Num(w(1, i)));
  }

  const Tensor table = RandomTable(200, 6, 1);
  std::vector<double> one_hot(200, 0.0), mid(200, 0.0);
  one_hot[42] = 1.0;
  mid[10] = mid[11] = 0.5;
  const Tensor e = EncodeWithEmbeddings(
      Tensor::FromVector({2, 200}, [&] {
        std::vector<double> v = one_hot;
        v.insert(v.end(), mid.begin(), mid.end());
        return v;
      }()),
      table);
  for (int d = 0; d < 6; ++d) {
    c.Expect(e.at(0, d) == table.at(42, d), "one-hot row differs");
    c.Expect(e.at(1, d) == 0.5 * table.at(10, d) + 0.5 * table.at(11, d),
             "midpoint row differs");
  }

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(100 * 200);
  for (double& x : w) x = u(rng) * u(rng) * u(rng);
  const Tensor convex = EncodeWithEmbeddings(Tensor::FromVector({100, 200}, w),
                                             table);
  for (int d = 0; d < 6; ++d) {
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 200; ++i) {
      lo = std::min(lo, table.at(i, d));
      hi = std::max(hi, table.at(i, d));
    }
    for (int n = 0; n < 100; ++n) {
      c.Expect(convex.at(n, d) >= lo - 1e-12 && convex.at(n, d) <= hi + 1e-12,
               "encoded value outside the convex hull");
    }
  }

  std::vector<double> values;
  for (double v = grid.FirstCenter() + 3 * grid.sigma();
       v <= grid.LastCenter() - 3 * grid.sigma(); v += 0.37) {
    values.push_back(v);
  }
  const std::vector<double> decoded =
      DecodeScalar(GaussianBinWeights(values, grid), grid);
  double worst = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    worst = std::max(worst, std::abs(decoded[i] - values[i]));
  }
  c.Expect(worst < grid.width() / 2, "decode error " + Num(worst));
  c.Note("max interior decode error " + Num(worst) + " over " +
         std::to_string(values.size()) + " values");
}

// 2. Units.
void Units(Check& c) {
  std::mt19937_64 rng(11);
  bool round_trip = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> len(1, 300), sym(0, 1 + trial % 12);
    std::vector<int> frames(len(rng));
    for (int& f : frames) f = sym(rng);
    const UnitSequence s = Deduplicate(frames);
    for (size_t k = 1; k < s.units.size(); ++k) {
      round_trip &= s.units[k] != s.units[k - 1];
    }
    round_trip &= Expand(s) == frames;
  }
  c.Expect(round_trip, "expand(deduplicate(x)) != x");

  FeatureConfig fc;
  std::vector<Waveform> low, high;
  for (int i = 0; i < 3; ++i) {
    Waveform a{Sawtooth(110.0 + 5 * i, 1.0, 16000, 0.4), 16000};
    low.push_back(a);
    Waveform b{std::vector<double>(16000), 16000};
    for (size_t t = 0; t < b.samples.size(); ++t) {
      b.samples[t] = 0.4 * std::sin(2.0 * M_PI * (1200.0 + 50 * i) * t / 16000);
    }
    high.push_back(b);
  }
  std::vector<Waveform> corpus = low;
  corpus.insert(corpus.end(), high.begin(), high.end());
  const UnitVocabulary v1 = FitVocabulary(corpus, 2, 5, fc);
  const UnitVocabulary v2 = FitVocabulary(corpus, 2, 5, fc);
  c.Expect(v1.centroids() == v2.centroids(), "k-means not deterministic");
  c.Expect(v1.Hash() == v2.Hash(), "vocabulary hash not deterministic");

  // Purity: each cluster counts its majority class.
  int counts[2][2] = {{0, 0}, {0, 0}};
  for (int cls = 0; cls < 2; ++cls) {
    for (const Waveform& w : cls == 0 ? low : high) {
      for (int id : v1.Quantize(w, fc)) counts[id][cls]++;
    }
  }
  const int total = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  const int majority = std::max(counts[0][0], counts[0][1]) +
                       std::max(counts[1][0], counts[1][1]);
  const double purity = static_cast<double>(majority) / total;
  c.Expect(purity >= 0.95, "two-tone purity " + Num(purity));
  c.Note("two-tone purity " + Num(purity));
}

// 3. Architectural independence on a randomly initialized model.
void Independence(Check& c) {
  const SystemConfig cfg = testing_support::ToyConfig();
  const testing_support::ToyCorpus corpus =
      testing_support::MakeToyCorpus(cfg, 2, 1.0);
  const UtteranceFeatures& u = corpus.features[0];
  ModelState state(cfg);
  state.Initialize(5);

  const UtteranceForward base = ForwardUtterance(state, u, cfg.train);
  PerturbGroup(state, "encoder.pitch_energy", 7);
  PerturbGroup(state, "encoder.speaker", 8);
  const UtteranceForward no_ps = ForwardUtterance(state, u, cfg.train);
  c.Expect(no_ps.speaker.values.values() != base.speaker.values.values(),
           "speaker perturbation had no effect");
  c.Expect(no_ps.pitch_energy.values.values() !=
               base.pitch_energy.values.values(),
           "pitch-energy perturbation had no effect");
  c.Expect(no_ps.log_durations.values() == base.log_durations.values(),
           "durations depend on pitch-energy or speaker attributes");

  PerturbGroup(state, "encoder.rhythm", 9);
  const UtteranceForward no_r = ForwardUtterance(state, u, cfg.train);
  c.Expect(no_r.rhythm.values.values() != no_ps.rhythm.values.values(),
           "rhythm perturbation had no effect");
  c.Expect(no_r.logits.pitch.values() == no_ps.logits.pitch.values() &&
               no_r.logits.energy.values() == no_ps.logits.energy.values() &&
               no_r.logits.voicing.values() == no_ps.logits.voicing.values(),
           "pitch-energy predictions depend on rhythm");
  PerturbGroup(state, "encoder.speaker", 10);
  const UtteranceForward no_s = ForwardUtterance(state, u, cfg.train);
  c.Expect(no_s.logits.pitch.values() == no_r.logits.pitch.values(),
           "pitch-energy predictions depend on speaker");

  // Energy branch with different speaker, units and pitch.
  const int n = u.num_frames();
  const Tensor ew = Tensor::FromMatrix(EnergyTargets(state, u));
  std::vector<uint8_t> voiced(n, 1);
  const SynthesisParts a = state.Synthesize(
      Tensor::FromMatrix(GaussianBinWeights(std::vector<double>(n, 30.0),
                                            state.pitch_grid())),
      voiced, ew, UnitSequence{{1, 2}, {n / 2, n - n / 2}}, base.speaker);
  const SynthesisParts b = state.Synthesize(
      Tensor::FromMatrix(GaussianBinWeights(std::vector<double>(n, -90.0),
                                            state.pitch_grid())),
      voiced, ew, UnitSequence{{7, 3, 9}, {3, 3, n - 6}}, no_s.speaker);
  c.Expect(a.mel.values() != b.mel.values(), "mel ignored all inputs");
  c.Expect(a.energy.values() == b.energy.values(),
           "energy branch depends on speaker, units or pitch");

  // Unvoiced frames ignore pitch values.
  std::vector<uint8_t> mixed(n, 1);
  for (int j = 0; j < n; j += 4) mixed[j] = 0;
  RealMatrix pw = GaussianBinWeights(std::vector<double>(n, 12.5),
                                     state.pitch_grid());
  RealMatrix pw2 = pw;
  const RealMatrix other = GaussianBinWeights(std::vector<double>(n, -180.0),
                                              state.pitch_grid());
  for (int j = 0; j < n; ++j) {
    if (!mixed[j]) pw2.row(j) = other.row(j);
  }
  const Tensor s1 =
      state.source_net().Forward(Tensor::FromMatrix(pw), mixed, base.speaker);
  const Tensor s2 =
      state.source_net().Forward(Tensor::FromMatrix(pw2), mixed, base.speaker);
  c.Expect(s1.values() == s2.values(), "unvoiced source output moved");

  // Broadcast addition: shifting the energy shifts every mel entry.
  const double delta = 0.375;
  const SynthesisParts& p = base.synthesis;
  const Tensor shifted =
      CombineBranches(p.source, p.filter, ag::AddScalar(p.energy, delta));
  double worst = 0.0;
  bool exact = true;
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < p.mel.dim(1); ++col) {
      const double e = p.energy.values()[r];
      worst = std::max(worst, std::abs(shifted.at(r, col) - p.mel.at(r, col) -
                                       delta));
      exact &= p.mel.at(r, col) == (p.source.at(r, col) + p.filter.at(r, col)) + e;
      exact &= shifted.at(r, col) ==
               (p.source.at(r, col) + p.filter.at(r, col)) + (e + delta);
    }
  }
  c.Expect(exact, "mel is not exactly source + filter + energy");
  c.Expect(worst <= 1e-12, "energy shift moved entries by " + Num(worst));
}

// 4. Gradients after one training step.
void Gradients(Check& c) {
  const SystemConfig cfg = testing_support::ToyConfig();
  const testing_support::ToyCorpus corpus =
      testing_support::MakeToyCorpus(cfg, 4, 1.0);
  const auto batch = corpus.Pointers();
  ModelState state(cfg);
  state.Initialize(17);
  Trainer trainer(&state, cfg.train);
  const LossReport r = trainer.TrainStep(batch);
  c.Expect(!r.skipped && r.AllFinite(), "first step skipped or non-finite");
  for (const std::string& g : ModelState::GroupNames()) {
    const auto it = trainer.last_gradient_norms().find(g);
    c.Expect(it != trainer.last_gradient_norms().end() && it->second > 0.0 &&
                 std::isfinite(it->second),
             "group " + g + " has no gradient");
  }

  TrainConfig off = cfg.train;
  off.joint_optimization = false;
  Trainer trainer_off(&state, off);
  const auto norms = trainer_off.GradientNorms(batch, kReconstruction |
                                                          kAdversarial);
  c.Expect(norms.at("pitch_energy") == 0.0,
           "predictor gradient with joint optimization off: " +
               Num(norms.at("pitch_energy")));
  c.Expect(norms.at("source") > 0.0, "source received no gradient");

  // Finite difference through the pitch embedding table.
  const UtteranceFeatures& u = corpus.features[0];
  Tensor table = state.source_net().table().table();
  auto loss = [&] {
    const UtteranceForward f = ForwardUtterance(state, u, cfg.train);
    return WeightedTotal(ComputeLossTerms(state, f, u), cfg.train,
                         kReconstruction | kPitchConsistency);
  };
  for (const NamedParameter& p : state.AllParameters()) {
    Tensor t = p.tensor;
    t.ZeroGrad();
  }
  loss().Backward();
  const std::vector<double> grad = table.grad();
  size_t idx = 0;
  for (size_t i = 1; i < grad.size(); ++i) {
    if (std::abs(grad[i]) > std::abs(grad[idx])) idx = i;
  }
  const double h = 1e-5;
  const double saved = table.values()[idx];
  table.values()[idx] = saved + h;
  const double up = loss().item();
  table.values()[idx] = saved - h;
  const double down = loss().item();
  table.values()[idx] = saved;
  const double numeric = (up - down) / (2 * h);
  const double rel = std::abs(numeric - grad[idx]) / std::abs(numeric);
  c.Expect(grad[idx] != 0.0 && rel < 1e-3,
           "finite difference relative error " + Num(rel));
  c.Note("bin embedding finite-difference relative error " + Num(rel));
}

// 5. Toy overfit.
constexpr int kOverfitSteps = 400;

void Overfit(Check& c) {
  SystemConfig cfg = ShippedToyConfig();
  const testing_support::ToyCorpus corpus =
      testing_support::MakeToyCorpus(cfg, 10, 1.0);
  std::vector<const UtteranceFeatures*> data = corpus.Pointers();
  ModelState state(cfg);
  state.Initialize(cfg.train.seed);
  Trainer trainer(&state, cfg.train);
  BatchSchedule schedule(static_cast<int>(data.size()), cfg.train.batch_size,
                         cfg.train.seed);
  std::vector<double> recon;
  bool finite = true, mix_ok = true;
  int skipped = 0;
  for (int step = 0; step < kOverfitSteps; ++step) {
    std::vector<const UtteranceFeatures*> batch;
    for (int i : schedule.Batch(state.step())) batch.push_back(data[i]);
    const LossReport r = trainer.TrainStep(batch);
    finite &= r.AllFinite();
    skipped += r.skipped ? 1 : 0;
    recon.push_back(r.recon_l1);

    const RealMatrix& gt = trainer.last_pitch_target();
    const RealMatrix& pred = trainer.last_pitch_prediction();
    mix_ok &= MixBinWeights(gt, pred, 1.0) == gt;
    mix_ok &= MixBinWeights(gt, pred, 0.0) == pred;
    const double coeff = cfg.train.mix_coefficient;
    mix_ok &= (MixBinWeights(gt, gt, coeff) - gt).cwiseAbs().maxCoeff() <= 1e-15;
    mix_ok &= (MixBinWeights(pred, pred, coeff) - pred).cwiseAbs().maxCoeff() <=
              1e-15;
  }
  auto mean = [&](int from, int to) {
    double s = 0.0;
    for (int i = from; i < to; ++i) s += recon[i];
    return s / (to - from);
  };
  const double early = mean(0, 5);
  const double late = mean(kOverfitSteps - 5, kOverfitSteps);
  c.Expect(finite, "non-finite loss report");
  c.Expect(skipped == 0, std::to_string(skipped) + " skipped steps");
  c.Expect(mix_ok, "mixing identity violated");
  c.Expect(late <= 0.5 * early,
           "reconstruction L1 " + Num(early) + " -> " + Num(late));
  c.Note("reconstruction L1 (5-step mean) " + Num(early) + " -> " + Num(late) +
         " after " + std::to_string(kOverfitSteps) + " steps");
}

// 6. End to end through the command layer.
constexpr int kPipelineSteps = 200;

nlohmann::json ReadJson(const std::string& path) {
  return nlohmann::json::parse(ReadFileBytes(path));
}

void Pipeline(Check& c) {
  TempDir dir;
  std::ostringstream out, err;
  CommonOptions common;
  common.config_path = std::string(UNITVC_SOURCE_DIR) + "/configs/toy.conf";

  ToyCorpusOptions toy;
  toy.out_dir = dir.File("wavs");
  toy.count = 10;
  toy.seconds = 1.0;
  c.Expect(CmdMakeToyCorpus(toy, out, err) == 0, "make-toy failed");

  ExtractOptions ex;
  ex.common = common;
  ex.manifest = dir.File("wavs/manifest.txt");
  ex.cache_dir = dir.File("cache");
  c.Expect(CmdExtract(ex, out, err) == 0, "extract failed: " + err.str());

  TrainOptions tr;
  tr.common = common;
  tr.cache_dir = ex.cache_dir;
  tr.checkpoint_dir = dir.File("ckpt");
  tr.steps = kPipelineSteps;
  const auto t0 = std::chrono::steady_clock::now();
  c.Expect(CmdTrain(tr, out, err) == 0, "train failed: " + err.str());
  c.excluded_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  std::ifstream log(TrainLogPath(tr.checkpoint_dir));
  int lines = 0;
  for (std::string line; std::getline(log, line);) lines += !line.empty();
  c.Expect(lines == kPipelineSteps,
           "train log has " + std::to_string(lines) + " lines");
  if (!c.ok()) return;

  const std::string ckpt = LatestCheckpointPath(tr.checkpoint_dir);
  const std::string src = dir.File("wavs/toy_000.wav");
  const std::string tgt = dir.File("wavs/toy_004.wav");
  auto convert = [&](const std::string& transfer, const std::string& prosody,
                     const std::string& name) {
    ConvertOptions o;
    o.common = common;
    o.checkpoint = ckpt;
    o.source = src;
    o.target = tgt;
    o.transfer = transfer;
    o.prosody_source = prosody;
    o.out = dir.File("out/" + name + ".wav");
    fs::create_directories(dir.File("out"));
    std::ostringstream o_out, o_err;
    const int rc = CmdConvert(o, o_out, o_err);
    c.Expect(rc == 0, "convert " + name + " failed: " + o_err.str());
    return rc == 0 ? ReadJson(dir.File("out/" + name + ".json"))
                   : nlohmann::json();
  };
  const nlohmann::json speaker = convert("speaker", "gt", "speaker");
  const nlohmann::json prosody = convert("prosody", "predicted", "prosody");
  convert("speaker", "gt", "speaker_again");
  if (!c.ok()) return;

  const auto state = ModelState::Load(ckpt);
  const SystemConfig& cfg = state->config();
  const UtteranceFeatures s =
      ExtractFeaturesFromFile(src, "src", state->vocabulary(), cfg);
  const UtteranceFeatures t =
      ExtractFeaturesFromFile(tgt, "tgt", state->vocabulary(), cfg);
  c.Expect(speaker["frames"].get<int>() == s.num_frames(),
           "speaker conversion has " + speaker["frames"].dump() +
               " frames, source " + std::to_string(s.num_frames()));

  int expected = 0;
  {
    ag::NoGradGuard no_grad;
    const AttributeVector rhythm =
        state->EncodeAttribute(AttributeKind::kRhythm, t.wave);
    for (int d : DecodeDurations(
             state->PredictLogDurations(s.units, rhythm).values(),
             cfg.model.max_duration)) {
      expected += d;
    }
  }
  c.Expect(prosody["frames"].get<int>() == expected,
           "prosody conversion has " + prosody["frames"].dump() +
               " frames, decoded durations sum to " + std::to_string(expected));

  for (const auto& [transfer, mode] :
       {std::pair{"speaker", ProsodySource::kGroundTruth},
        std::pair{"prosody", ProsodySource::kPredicted}}) {
    const ConversionRequest req{&s, &t, ParseTransfer(transfer), mode};
    const ConversionResult a = Convert(req, *state);
    const ConversionResult b = Convert(req, *state);
    c.Expect(a.mel.frames == b.mel.frames,
             std::string("repeated ") + transfer + " conversion differs");
  }
  c.Expect(ReadFileBytes(dir.File("out/speaker.wav")) ==
               ReadFileBytes(dir.File("out/speaker_again.wav")),
           "repeated conversion wrote different audio");

  WriteFileBytes(dir.File("pairs.txt"),
                 tgt + " " + dir.File("out/speaker.wav") + " speaker\n" + tgt +
                     " " + dir.File("out/prosody.wav") + " prosody\n");
  EvalOptions ev;
  ev.common = common;
  ev.pairs = dir.File("pairs.txt");
  ev.out = dir.File("metrics.json");
  std::ostringstream e_out, e_err;
  c.Expect(CmdEval(ev, e_out, e_err) == 0, "eval failed: " + e_err.str());
  c.Expect(fs::exists(ev.out), "no metrics written");
  c.Note("frames: source " + std::to_string(s.num_frames()) + ", prosody " +
         std::to_string(expected) + "; training " + Num(c.excluded_seconds) +
         " s for " + std::to_string(kPipelineSteps) + " steps");
}

// 7. Metrics.
void Metrics(Check& c) {
  const std::vector<double> x{1.0, 2.5, -0.5, 4.0, 3.0, 0.25};
  std::vector<double> affine, negated;
  for (double v : x) {
    affine.push_back(3.0 * v - 7.0);
    negated.push_back(-2.0 * v + 1.0);
  }
  auto pcc = [](const std::vector<double>& a, const std::vector<double>& b) {
    const MetricValue m = Pcc(a, b);
    return m.valid() ? *m.value : NAN;
  };
  c.Expect(std::abs(pcc(x, x) - 1.0) < 1e-12, "self PCC " + Num(pcc(x, x)));
  c.Expect(std::abs(pcc(x, affine) - 1.0) < 1e-12, "affine PCC");
  c.Expect(std::abs(pcc(x, negated) + 1.0) < 1e-12, "negated PCC");
  std::vector<double> y{0.3, -1.0, 2.0, 0.7, 1.1, -0.4}, y2;
  for (double v : y) y2.push_back(0.5 * v + 10.0);
  c.Expect(std::abs(pcc(x, y) - pcc(x, y2)) < 1e-12, "PCC not affine invariant");
  const MetricValue flat = Pcc(x, std::vector<double>(x.size(), 2.0));
  c.Expect(!flat.valid() && flat.skip_reason == kSkipZeroVariance,
           "zero variance not skipped");

  const std::vector<double> v{0.3, -1.2, 2.0};
  c.Expect(std::abs(EmbeddingCosine(v, v) - 1.0) < 1e-12, "cosine self");
  c.Expect(std::abs(EmbeddingCosine(v, {-0.3, 1.2, -2.0}) + 1.0) < 1e-12,
           "cosine opposite");
  c.Expect(std::abs(EmbeddingCosine({1, 0, 0}, {0, 4, 0})) < 1e-12,
           "cosine orthogonal");

  const SystemConfig cfg = testing_support::ToyConfig();
  const testing_support::ToyCorpus corpus =
      testing_support::MakeToyCorpus(cfg, 1, 1.0);
  const ProsodyPcc self =
      ComputeProsodyPcc(corpus.features[0], corpus.features[0]);
  c.Expect(self.log_f0.valid() && std::abs(*self.log_f0.value - 1.0) < 1e-6,
           "self-pair log-f0 PCC");
  c.Expect(self.energy.valid() && std::abs(*self.energy.value - 1.0) < 1e-6,
           "self-pair energy PCC");
}

// 8. Serialization.
void Serialization(Check& c) {
  TempDir dir;
  const SystemConfig cfg = testing_support::ToyConfig();
  const testing_support::ToyCorpus corpus =
      testing_support::MakeToyCorpus(cfg, 2, 1.0);

  ModelState state(cfg);
  state.Initialize(4);
  state.vocabulary() = corpus.vocabulary;
  Trainer trainer(&state, cfg.train);
  trainer.TrainStep(corpus.Pointers());
  const std::string path = dir.File("a.ckpt");
  state.Save(path);
  const auto loaded = ModelState::Load(path, cfg);
  const auto pa = state.AllParameters();
  const auto pb = loaded->AllParameters();
  bool same = pa.size() == pb.size() && loaded->step() == state.step();
  for (size_t i = 0; same && i < pa.size(); ++i) {
    same &= pa[i].name == pb[i].name &&
            pa[i].tensor.values() == pb[i].tensor.values();
  }
  c.Expect(same, "checkpoint parameters differ after reload");
  c.Expect(loaded->vocabulary().centroids() == state.vocabulary().centroids(),
           "checkpoint vocabulary differs");
  loaded->Save(dir.File("b.ckpt"));
  c.Expect(ReadFileBytes(path) == ReadFileBytes(dir.File("b.ckpt")),
           "re-saved checkpoint is not byte identical");

  const UtteranceFeatures& u = corpus.features[1];
  SaveCacheRecord(dir.path(), u);
  const UtteranceFeatures back =
      LoadCacheRecord(CacheRecordPath(dir.path(), u.id));
  c.Expect(back.mel.frames == u.mel.frames && back.pitch.pitch == u.pitch.pitch &&
               back.pitch.voicing == u.pitch.voicing &&
               back.pitch.mean_f0 == u.pitch.mean_f0 &&
               back.energy.energy == u.energy.energy &&
               back.units.units == u.units.units &&
               back.units.durations == u.units.durations &&
               back.wave.samples == u.wave.samples &&
               back.feature_fingerprint == u.feature_fingerprint,
           "cache record differs after reload");
  c.Expect(SerializeFeatures(back) == SerializeFeatures(u),
           "cache record bytes differ");

  SystemConfig other = cfg;
  other.Set("model.attribute_dim", "48");
  bool rejected = false;
  try {
    ModelState::Load(path, other);
  } catch (const FingerprintError&) {
    rejected = true;
  }
  c.Expect(rejected, "checkpoint accepted under another model config");

  SystemConfig hop = cfg;
  hop.Set("feature.hop_length", "160");
  UtteranceFeatures foreign = u;
  foreign.feature_fingerprint = hop.FeatureFingerprint();
  rejected = false;
  try {
    Convert({&foreign, &u, ParseTransfer("speaker"), ProsodySource::kGroundTruth},
            state);
  } catch (const FingerprintError&) {
    rejected = true;
  }
  c.Expect(rejected, "features from another config accepted");
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace unitvc

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_minloglevel = 1;
  using unitvc::Check;
  const std::vector<unitvc::Criterion> criteria = {
      {1, "bin encoding", 10, unitvc::BinEncoding},
      {2, "units", 60, unitvc::Units},
      {3, "architectural independence", 30, unitvc::Independence},
      {4, "gradients", 120, unitvc::Gradients},
      {5, "toy overfit", 1800, unitvc::Overfit},
      {6, "end-to-end pipeline", 300, unitvc::Pipeline},
      {7, "metrics", 10, unitvc::Metrics},
      {8, "serialization", 10, unitvc::Serialization},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), cr.id) == only.end()) {
      continue;
    }
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const double charged = seconds - check.excluded_seconds;
    check.Expect(charged <= cr.budget_seconds,
                 "runtime " + unitvc::Num(charged) + " s over budget");
    for (const auto& n : check.notes()) {
      std::printf("  [%d] %s\n", cr.id, n.c_str());
    }
    for (const auto& f : check.failures()) {
      std::printf("  [%d] failed: %s\n", cr.id, f.c_str());
    }
    std::printf("%s %d %s (%.1f s)\n", check.ok() ? "PASS" : "FAIL", cr.id,
                cr.name, seconds);
    std::fflush(stdout);
    failed += check.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
