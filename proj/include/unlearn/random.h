// Copyright 2026 The Unlearn-DP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded randomness. All randomness in the library flows from explicit
// 64-bit seeds; independent streams are derived by mixing (seed, index) so
// that parallel work is reproducible regardless of scheduling.

#ifndef UNLEARN_RANDOM_H_
#define UNLEARN_RANDOM_H_

#include <cstdint>
#include <random>

namespace unlearn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr uint64_t MixBits(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of the `index`-th independent stream under `base`.
constexpr uint64_t DeriveSeed(uint64_t base, uint64_t index) {
  return MixBits(MixBits(base) ^ MixBits(index + 0x632be59bd9b4e019ULL));
}

inline Rng MakeRng(uint64_t seed) { return Rng(MixBits(seed)); }

}  // namespace unlearn

#endif  // UNLEARN_RANDOM_H_
