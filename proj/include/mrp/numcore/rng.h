// Copyright 2026 The MRP Authors.
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

#ifndef MRP_NUMCORE_RNG_H_
#define MRP_NUMCORE_RNG_H_

#include <cstdint>
#include <string_view>

namespace mrp::numcore {

// Counter-based generator: the i-th output is a SplitMix64 finalizer of
// (key + i * golden). Streams depend only on the 64-bit key, so they are
// identical on every platform, and independent sub-streams are derived by
// hashing extra keys (example id, epoch, purpose) into the key.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed)) {}

  // A new stream keyed by this stream's key and `k`. Does not advance this
  // stream.
  Rng derive(std::uint64_t k) const;
  Rng derive(std::string_view k) const { return derive(hash(k)); }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller (no cached second value).
  double normal();

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t x);
  // 64-bit FNV-1a.
  static std::uint64_t hash(std::string_view s);

 private:
  Rng(std::uint64_t key, bool) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mrp::numcore

#endif  // MRP_NUMCORE_RNG_H_
