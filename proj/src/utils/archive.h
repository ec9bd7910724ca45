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

#ifndef UTILS_ARCHIVE_H_
#define UTILS_ARCHIVE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace unitvc {

// Versioned container of named arrays. Layout (little endian):
//   "UVCA" | u32 version | u32 count |
//   count x (u32 name_len | name | u8 dtype | u32 rank | u64 dims[rank] |
//            payload) |
//   u64 FNV-1a checksum of all preceding bytes
// dtype 1 = float64, 2 = int64, 3 = raw bytes (rank 1).
class Archive {
 public:
  enum class DType : uint8_t { kFloat64 = 1, kInt64 = 2, kBytes = 3 };

  struct Entry {
    DType dtype = DType::kFloat64;
    std::vector<uint64_t> dims;
    std::vector<double> doubles;
    std::vector<int64_t> ints;
    std::string bytes;
  };

  static constexpr uint32_t kVersion = 1;

  void PutDoubles(const std::string& name, std::vector<uint64_t> dims,
                  std::vector<double> values);
  void PutInts(const std::string& name, std::vector<uint64_t> dims,
               std::vector<int64_t> values);
  void PutString(const std::string& name, std::string value);

  bool Has(const std::string& name) const;
  const Entry& Get(const std::string& name) const;
  const std::vector<double>& GetDoubles(const std::string& name) const;
  const std::vector<int64_t>& GetInts(const std::string& name) const;
  const std::string& GetString(const std::string& name) const;
  std::vector<std::string> Names() const { return order_; }

  std::string Serialize() const;
  static Archive Deserialize(const std::string& bytes);
  void Save(const std::string& path) const;
  static Archive Load(const std::string& path);

 private:
  Entry& Insert(const std::string& name);

  std::vector<std::string> order_;
  std::map<std::string, Entry> entries_;
};

}  // namespace unitvc

#endif  // UTILS_ARCHIVE_H_
