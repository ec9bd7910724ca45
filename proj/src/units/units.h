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

#ifndef UNITS_UNITS_H_
#define UNITS_UNITS_H_

#include <cstdint>
#include <vector>

namespace unitvc {

// Run-length form of a frame-level unit sequence: no two neighbouring units
// are equal and every duration is >= 1.
struct UnitSequence {
  std::vector<int> units;
  std::vector<int> durations;

  int size() const { return static_cast<int>(units.size()); }
  int TotalFrames() const;
};

// Throws std::invalid_argument when the invariants do not hold.
void ValidateUnitSequence(const UnitSequence& seq);

// Collapses runs of identical units. Throws on empty input.
UnitSequence Deduplicate(const std::vector<int>& frames);

// Repeats each unit by its duration.
std::vector<int> Expand(const UnitSequence& seq);

// Per-frame index of the unit covering that frame, length TotalFrames().
std::vector<int64_t> ExpansionIndex(const std::vector<int>& durations);

}  // namespace unitvc

#endif  // UNITS_UNITS_H_
