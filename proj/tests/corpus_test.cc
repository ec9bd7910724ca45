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

#include <cstdlib>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "corpus/cache.h"
#include "corpus/manifest.h"
#include "corpus/utterance.h"
#include "test_support.h"
#include "utils/archive.h"
#include "utils/string_util.h"

namespace unitvc {
namespace {

using testing_support::TempDir;
using testing_support::ToyConfig;

const testing_support::ToyCorpus& Corpus() {
  static const auto* c = new testing_support::ToyCorpus(
      testing_support::MakeToyCorpus(ToyConfig(), 3, 1.0));
  return *c;
}

void ExpectSameFeatures(const UtteranceFeatures& a, const UtteranceFeatures& b) {
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.label, b.label);
  EXPECT_EQ(a.wave.samples, b.wave.samples);
  EXPECT_EQ(a.wave.sample_rate, b.wave.sample_rate);
  EXPECT_TRUE(a.mel.frames == b.mel.frames);
  EXPECT_EQ(a.mel.hop_seconds, b.mel.hop_seconds);
  EXPECT_EQ(a.pitch.pitch, b.pitch.pitch);
  EXPECT_EQ(a.pitch.voicing, b.pitch.voicing);
  EXPECT_EQ(a.pitch.mean_f0, b.pitch.mean_f0);
  EXPECT_EQ(a.pitch.normalized, b.pitch.normalized);
  EXPECT_EQ(a.energy.energy, b.energy.energy);
  EXPECT_EQ(a.units.units, b.units.units);
  EXPECT_EQ(a.units.durations, b.units.durations);
  EXPECT_EQ(a.content_hash, b.content_hash);
  EXPECT_EQ(a.feature_fingerprint, b.feature_fingerprint);
  EXPECT_EQ(a.vocabulary_hash, b.vocabulary_hash);
}

TEST(UtteranceTest, ExtractedStreamsAreAligned) {
  for (const UtteranceFeatures& u : Corpus().features) {
    EXPECT_NO_THROW(CheckAligned(u));
    EXPECT_EQ(u.num_frames(), 50);
    EXPECT_EQ(u.units.TotalFrames(), u.num_frames());
    EXPECT_EQ(u.energy.num_frames(), u.num_frames());
    EXPECT_EQ(u.pitch.num_frames(), u.num_frames());
    EXPECT_TRUE(u.pitch.normalized);
    EXPECT_EQ(u.feature_fingerprint, ToyConfig().FeatureFingerprint());
  }
  UtteranceFeatures broken = Corpus().features[0];
  broken.energy.energy.pop_back();
  EXPECT_THROW(CheckAligned(broken), std::exception);
}

TEST(CacheTest, RecordRoundTripIsBitExact) {
  TempDir dir;
  UtteranceFeatures u = Corpus().features[1];
  u.label = "speaker b";
  SaveCacheRecord(dir.path(), u);
  UtteranceFeatures back = LoadCacheRecord(CacheRecordPath(dir.path(), u.id));
  ExpectSameFeatures(u, back);
  EXPECT_EQ(SerializeFeatures(u), SerializeFeatures(back));
  auto sidecar = ReadSidecar(dir.path(), u.id);
  ASSERT_TRUE(sidecar.has_value());
  EXPECT_EQ(sidecar->num_frames, 50);
  EXPECT_EQ(sidecar->num_units, u.units.size());
  EXPECT_EQ(sidecar->mean_f0, u.pitch.mean_f0);
  EXPECT_EQ(sidecar->content_hash, u.content_hash);
  EXPECT_FALSE(ReadSidecar(dir.path(), "absent").has_value());
}

TEST(CacheTest, SidecarTextRoundTrip) {
  CacheSidecar s{"utt7", 123.456789012345, 77, 12, 0xdeadbeefcafef00dULL,
                 42, 0xffffffffffffffffULL};
  CacheSidecar t = ParseSidecar(FormatSidecar(s));
  EXPECT_EQ(t.id, s.id);
  EXPECT_EQ(t.mean_f0, s.mean_f0);
  EXPECT_EQ(t.num_frames, s.num_frames);
  EXPECT_EQ(t.num_units, s.num_units);
  EXPECT_EQ(t.content_hash, s.content_hash);
  EXPECT_EQ(t.feature_fingerprint, s.feature_fingerprint);
  EXPECT_EQ(t.vocabulary_hash, s.vocabulary_hash);
}

TEST(CacheTest, CorruptRecordIsRejected) {
  std::string bytes = SerializeFeatures(Corpus().features[0]);
  bytes[bytes.size() / 3] ^= 0x11;
  EXPECT_THROW(DeserializeFeatures(bytes), std::exception);
  EXPECT_THROW(DeserializeFeatures(bytes.substr(0, 20)), std::exception);
}

TEST(CacheTest, ListingAndRootOverride) {
  TempDir dir;
  for (const auto& u : Corpus().features) SaveCacheRecord(dir.path(), u);
  auto records = ListCacheRecords(dir.path());
  ASSERT_EQ(records.size(), 3u);
  EXPECT_TRUE(std::is_sorted(records.begin(), records.end()));

  const char* old = std::getenv("UNITVC_CACHE_ROOT");
  const std::string saved = old ? old : "";
  setenv("UNITVC_CACHE_ROOT", dir.path().c_str(), 1);
  EXPECT_EQ(ResolveCacheDir("sub"),
            (std::filesystem::path(dir.path()) / "sub").string());
  EXPECT_EQ(ResolveCacheDir("/abs/cache"), "/abs/cache");
  unsetenv("UNITVC_CACHE_ROOT");
  EXPECT_EQ(ResolveCacheDir("sub"), "sub");
  if (old) setenv("UNITVC_CACHE_ROOT", saved.c_str(), 1);
}

TEST(ArchiveTest, RoundTripAndChecksum) {
  Archive a;
  a.PutDoubles("x", {2, 2}, {1.5, -0.0, 1e-300, 3.0});
  a.PutInts("n", {3}, {-1, 0, 1LL << 40});
  a.PutString("s", std::string("a\0b", 3));
  Archive b = Archive::Deserialize(a.Serialize());
  EXPECT_EQ(b.GetDoubles("x"), a.GetDoubles("x"));
  EXPECT_EQ(b.GetInts("n"), a.GetInts("n"));
  EXPECT_EQ(b.GetString("s"), std::string("a\0b", 3));
  EXPECT_EQ(b.Names(), a.Names());
  EXPECT_EQ(b.Serialize(), a.Serialize());
  std::string bytes = a.Serialize();
  bytes[10] ^= 1;
  EXPECT_THROW(Archive::Deserialize(bytes), std::exception);
  EXPECT_THROW(b.Get("missing"), std::exception);
}

TEST(ManifestTest, ParsesPathsAndLabels) {
  auto entries = ParseManifest(
      "# corpus\n\nwavs/a.wav spk1\n/abs/b.wav\n  c.wav  spk\n", "/data");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].id, "a");
  EXPECT_EQ(entries[0].path, "/data/wavs/a.wav");
  EXPECT_EQ(entries[0].label, "spk1");
  EXPECT_EQ(entries[1].path, "/abs/b.wav");
  EXPECT_EQ(entries[1].label, "");
  EXPECT_EQ(entries[2].id, "c");
  EXPECT_EQ(entries[2].label, "spk");
  EXPECT_EQ(FileStem("/x/y/z.tar.wav"), "z.tar");
}

}  // namespace
}  // namespace unitvc
