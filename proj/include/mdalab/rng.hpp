// Copyright 2026 The mdalab Authors
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

#pragma once

/// @file rng.hpp
/// @brief Counter-based random numbers: every draw is a pure function of
/// (seed, stream, index, lane), so results do not depend on thread layout.

#include <cstdint>
#include <string_view>

namespace mdalab {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable 64-bit id for an experiment or stream name.
inline constexpr std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t index, std::uint32_t lane) const {
    return splitmix64(key_ ^ splitmix64(index * 0x9e3779b97f4a7c15ULL + lane));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index, std::uint32_t lane) const {
    return static_cast<double>(bits(index, lane) >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(std::uint64_t index, std::uint32_t lane, double lo,
                           double hi) const {
    return lo + (hi - lo) * uniform(index, lane);
  }

  /// Derived generator for a sub-stream (e.g. one sample that needs many draws).
  constexpr CounterRng derive(std::uint64_t sub) const { return CounterRng(key_, sub); }

 private:
  std::uint64_t key_;
};

}  // namespace mdalab
