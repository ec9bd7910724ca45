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

#include "utils/archive.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "utils/string_util.h"

namespace unitvc {

namespace {

constexpr char kMagic[4] = {'U', 'V', 'C', 'A'};

template <typename T>
void Append(std::string* out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out->append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Read() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string ReadBytes(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename T>
  std::vector<T> ReadArray(size_t n) {
    if (n > (bytes_.size() - pos_) / sizeof(T)) {
      throw std::runtime_error("corrupt archive: truncated payload");
    }
    std::vector<T> v(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }

  size_t pos() const { return pos_; }

 private:
  void Need(size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("corrupt archive: truncated");
    }
  }

  const std::string& bytes_;
  size_t pos_ = 0;
};

uint64_t Product(const std::vector<uint64_t>& dims) {
  uint64_t n = 1;
  for (uint64_t d : dims) n *= d;
  return n;
}

}  // namespace

Archive::Entry& Archive::Insert(const std::string& name) {
  if (entries_.find(name) == entries_.end()) order_.push_back(name);
  Entry& e = entries_[name];
  e = Entry();
  return e;
}

void Archive::PutDoubles(const std::string& name, std::vector<uint64_t> dims,
                         std::vector<double> values) {
  if (Product(dims) != values.size()) {
    throw std::invalid_argument("archive entry '" + name +
                                "': dims do not match value count");
  }
  Entry& e = Insert(name);
  e.dtype = DType::kFloat64;
  e.dims = std::move(dims);
  e.doubles = std::move(values);
}

void Archive::PutInts(const std::string& name, std::vector<uint64_t> dims,
                      std::vector<int64_t> values) {
  if (Product(dims) != values.size()) {
    throw std::invalid_argument("archive entry '" + name +
                                "': dims do not match value count");
  }
  Entry& e = Insert(name);
  e.dtype = DType::kInt64;
  e.dims = std::move(dims);
  e.ints = std::move(values);
}

void Archive::PutString(const std::string& name, std::string value) {
  Entry& e = Insert(name);
  e.dtype = DType::kBytes;
  e.dims = {value.size()};
  e.bytes = std::move(value);
}

bool Archive::Has(const std::string& name) const {
  return entries_.count(name) > 0;
}

const Archive::Entry& Archive::Get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw std::runtime_error("archive has no entry '" + name + "'");
  }
  return it->second;
}

const std::vector<double>& Archive::GetDoubles(const std::string& name) const {
  const Entry& e = Get(name);
  if (e.dtype != DType::kFloat64) {
    throw std::runtime_error("archive entry '" + name + "' is not float64");
  }
  return e.doubles;
}

const std::vector<int64_t>& Archive::GetInts(const std::string& name) const {
  const Entry& e = Get(name);
  if (e.dtype != DType::kInt64) {
    throw std::runtime_error("archive entry '" + name + "' is not int64");
  }
  return e.ints;
}

const std::string& Archive::GetString(const std::string& name) const {
  const Entry& e = Get(name);
  if (e.dtype != DType::kBytes) {
    throw std::runtime_error("archive entry '" + name + "' is not bytes");
  }
  return e.bytes;
}

std::string Archive::Serialize() const {
  std::string out(kMagic, 4);
  Append<uint32_t>(&out, kVersion);
  Append<uint32_t>(&out, static_cast<uint32_t>(order_.size()));
  for (const std::string& name : order_) {
    const Entry& e = entries_.at(name);
    Append<uint32_t>(&out, static_cast<uint32_t>(name.size()));
    out += name;
    Append<uint8_t>(&out, static_cast<uint8_t>(e.dtype));
    Append<uint32_t>(&out, static_cast<uint32_t>(e.dims.size()));
    for (uint64_t d : e.dims) Append<uint64_t>(&out, d);
    switch (e.dtype) {
      case DType::kFloat64:
        out.append(reinterpret_cast<const char*>(e.doubles.data()),
                   e.doubles.size() * sizeof(double));
        break;
      case DType::kInt64:
        out.append(reinterpret_cast<const char*>(e.ints.data()),
                   e.ints.size() * sizeof(int64_t));
        break;
      case DType::kBytes:
        out += e.bytes;
        break;
    }
  }
  Append<uint64_t>(&out, Fnv1a64(out));
  return out;
}

Archive Archive::Deserialize(const std::string& bytes) {
  if (bytes.size() < 4 + 4 + 4 + 8 || bytes.compare(0, 4, kMagic, 4) != 0) {
    throw std::runtime_error("corrupt archive: bad magic");
  }
  uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  const std::string body = bytes.substr(0, bytes.size() - 8);
  if (Fnv1a64(body) != stored) {
    throw std::runtime_error("corrupt archive: checksum mismatch");
  }
  Reader r(body);
  r.ReadBytes(4);
  const uint32_t version = r.Read<uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error("unsupported archive version " +
                             std::to_string(version));
  }
  const uint32_t count = r.Read<uint32_t>();
  Archive a;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.Read<uint32_t>();
    const std::string name = r.ReadBytes(name_len);
    const auto dtype = static_cast<DType>(r.Read<uint8_t>());
    const uint32_t rank = r.Read<uint32_t>();
    std::vector<uint64_t> dims(rank);
    for (auto& d : dims) d = r.Read<uint64_t>();
    const uint64_t n = Product(dims);
    switch (dtype) {
      case DType::kFloat64:
        a.PutDoubles(name, dims, r.ReadArray<double>(n));
        break;
      case DType::kInt64:
        a.PutInts(name, dims, r.ReadArray<int64_t>(n));
        break;
      case DType::kBytes:
        a.PutString(name, r.ReadBytes(n));
        break;
      default:
        throw std::runtime_error("corrupt archive: unknown dtype");
    }
  }
  if (r.pos() != body.size()) {
    throw std::runtime_error("corrupt archive: trailing bytes");
  }
  return a;
}

void Archive::Save(const std::string& path) const {
  // Write then rename so a crash never leaves a half-written archive behind.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    const std::string bytes = Serialize();
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move " + tmp + " to " + path);
  }
}

Archive Archive::Load(const std::string& path) {
  return Deserialize(ReadFileBytes(path));
}

}  // namespace unitvc
