//
// Copyright 2026 The userdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef USERDP_RANDOM_H_
#define USERDP_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace userdp {

// Deterministic, splittable pseudorandom stream.
//
// Every stream is identified by a 64-bit seed. Children are derived from
// (parent seed, label) through SplitMix64, so independent parts of a
// computation (trials, phases, data generation) never share state. The
// integer-valued draws depend only on the mt19937_64 bit stream, which the
// standard pins exactly, so they agree across platforms.
//
// Streams are move-only: copying one would silently replay randomness.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  RandomSource(RandomSource&&) = default;
  RandomSource& operator=(RandomSource&&) = default;
  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;

  RandomSource child(std::string_view label) const;
  RandomSource child(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  // Uniform on (0, 1]; safe to pass to log().
  double uniform_open_low();

  // Uniform on {0, ..., bound - 1}, unbiased. bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace userdp

#endif  // USERDP_RANDOM_H_
