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

#ifndef MRP_TRAINING_MASK_H_
#define MRP_TRAINING_MASK_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "mrp/corpus/types.h"
#include "mrp/numcore/rng.h"

namespace mrp::training {

// Positions of one example whose rationale bit (or token, for MLM) is
// hidden. Sorted ascending.
struct MaskPlan {
  std::vector<int> positions;
  double ratio = 0.0;
};

// round-half-up(ratio * eligible), at least 1. Throws InputError unless
// 0 < ratio <= 1 and eligible >= 1.
int mask_count(int eligible, double ratio);

// Real positions other than CLS and SEP: 1 .. attention_len - 2.
std::vector<int> eligible_positions(const corpus::Example& example);

// Uniform sample without replacement from eligible_positions(example).
MaskPlan sample_mask(const corpus::Example& example, double ratio,
                     numcore::Rng& rng);

// The generator sample_mask uses during training: a pure function of
// (seed, stream, example id, epoch).
numcore::Rng mask_rng(std::uint64_t seed, std::string_view stream,
                      std::string_view example_id, int epoch);

}  // namespace mrp::training

#endif  // MRP_TRAINING_MASK_H_
