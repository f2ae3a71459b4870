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

#include "mrp/training/mask.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrp/errors.h"

namespace mrp::training {

int mask_count(int eligible, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw InputError("mask ratio must be in (0, 1], got " +
                     std::to_string(ratio));
  }
  if (eligible < 1) throw InputError("no maskable positions");
  const int k = static_cast<int>(std::floor(ratio * eligible + 0.5));
  return std::clamp(k, 1, eligible);
}

std::vector<int> eligible_positions(const corpus::Example& example) {
  std::vector<int> out;
  for (int i = 1; i + 1 < example.attention_len; ++i) out.push_back(i);
  return out;
}

MaskPlan sample_mask(const corpus::Example& example, double ratio,
                     numcore::Rng& rng) {
  std::vector<int> pool = eligible_positions(example);
  if (pool.empty()) {
    throw InputError("example " + example.id + " has no maskable positions");
  }
  const int k = mask_count(static_cast<int>(pool.size()), ratio);
  // Partial Fisher-Yates.
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return {std::move(pool), ratio};
}

numcore::Rng mask_rng(std::uint64_t seed, std::string_view stream,
                      std::string_view example_id, int epoch) {
  return numcore::Rng(seed).derive(stream).derive(example_id).derive(
      static_cast<std::uint64_t>(epoch));
}

}  // namespace mrp::training
