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

#include "frontend/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "utils/string_util.h"

namespace unitvc {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const std::string& b, size_t pos) {
  uint32_t v;
  std::memcpy(&v, b.data() + pos, 4);
  return v;
}

uint16_t ReadU16(const std::string& b, size_t pos) {
  uint16_t v;
  std::memcpy(&v, b.data() + pos, 2);
  return v;
}

double DecodeSample(const unsigned char* p, uint16_t format, int bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return v / 32768.0;
    }
    case 24: {
      int32_t v = (p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    default: {
      int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
  }
}

}  // namespace

Waveform DecodeWav(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw std::runtime_error("not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_pos = 0, data_len = 0;
  bool have_data = false;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t len = ReadU32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (len < 16 || body + 16 > bytes.size()) {
        throw std::runtime_error("truncated fmt chunk");
      }
      format = ReadU16(bytes, body);
      channels = ReadU16(bytes, body + 2);
      rate = ReadU32(bytes, body + 4);
      bits = ReadU16(bytes, body + 14);
      if (format == kFormatExtensible && len >= 26) {
        format = ReadU16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_len = std::min<size_t>(len, bytes.size() - body);
      have_data = true;
      break;
    }
    pos = body + len + (len & 1);
  }
  if (!have_fmt || !have_data) throw std::runtime_error("missing fmt or data chunk");
  const bool int_ok = format == kFormatPcm &&
                      (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!int_ok && !float_ok) {
    throw std::runtime_error("unsupported encoding: format " +
                             std::to_string(format) + ", " +
                             std::to_string(bits) + " bits");
  }
  if (channels == 0 || rate == 0) throw std::runtime_error("invalid fmt chunk");
  const size_t frame_bytes = static_cast<size_t>(channels) * (bits / 8);
  const size_t frames = data_len / frame_bytes;
  if (frames == 0) throw std::runtime_error("empty audio");
  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + data_pos);
  for (size_t i = 0; i < frames; ++i) {
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) {
      sum += DecodeSample(p + i * frame_bytes + c * (bits / 8), format, bits);
    }
    w.samples[i] = sum / channels;
  }
  return w;
}

Waveform ReadWav(const std::string& path) {
  std::string bytes;
  try {
    bytes = ReadFileBytes(path);
  } catch (const std::exception&) {
    throw std::runtime_error("unreadable file: " + path);
  }
  try {
    return DecodeWav(bytes);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Waveform LoadWaveform(const std::string& path, int target_rate) {
  Waveform w = ReadWav(path);
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw std::runtime_error(path + ": non-finite samples");
  }
  if (w.sample_rate != target_rate) {
    w.samples = Resample(w.samples, w.sample_rate, target_rate);
    w.sample_rate = target_rate;
  }
  if (w.samples.empty()) throw std::runtime_error(path + ": empty audio");
  return w;
}

std::string EncodeWav(const Waveform& wave) {
  const uint32_t n = static_cast<uint32_t>(wave.samples.size());
  const uint32_t data_len = n * 2;
  std::string out;
  auto u32 = [&out](uint32_t v) { out.append(reinterpret_cast<char*>(&v), 4); };
  auto u16 = [&out](uint16_t v) { out.append(reinterpret_cast<char*>(&v), 2); };
  out += "RIFF";
  u32(36 + data_len);
  out += "WAVEfmt ";
  u32(16);
  u16(kFormatPcm);
  u16(1);
  u32(static_cast<uint32_t>(wave.sample_rate));
  u32(static_cast<uint32_t>(wave.sample_rate) * 2);
  u16(2);
  u16(16);
  out += "data";
  u32(data_len);
  for (double s : wave.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const int16_t v = static_cast<int16_t>(std::lround(c * 32767.0));
    u16(static_cast<uint16_t>(v));
  }
  return out;
}

void WriteWav(const std::string& path, const Waveform& wave) {
  WriteFileBytes(path, EncodeWav(wave));
}

std::vector<double> Resample(const std::vector<double>& samples, int from_rate,
                             int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) {
    throw std::invalid_argument("sample rates must be positive");
  }
  if (from_rate == to_rate) return samples;
  const size_t out_len = static_cast<size_t>(std::llround(
      static_cast<double>(samples.size()) * to_rate / from_rate));
  std::vector<double> out(out_len, 0.0);
  const double ratio = static_cast<double>(from_rate) / to_rate;
  const double cutoff = std::min(1.0, 1.0 / ratio);  // relative to input Nyquist
  constexpr int kZeroCrossings = 16;
  const double half_width = kZeroCrossings / cutoff;
  const long n_in = static_cast<long>(samples.size());
  for (size_t m = 0; m < out_len; ++m) {
    const double center = m * ratio;
    const long lo = std::max(0L, static_cast<long>(std::ceil(center - half_width)));
    const long hi =
        std::min(n_in - 1, static_cast<long>(std::floor(center + half_width)));
    double acc = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double t = (k - center) * cutoff;
      const double sinc = t == 0.0 ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
      const double win = 0.5 + 0.5 * std::cos(M_PI * (k - center) / half_width);
      acc += samples[k] * cutoff * sinc * win;
    }
    out[m] = acc;
  }
  return out;
}

}  // namespace unitvc
