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

#include "mrp/encoder/classifier.h"

#include "mrp/errors.h"

namespace mrp::encoder {

ClassProbs EncoderClassifier::class_probs(std::span<const int> ids,
                                          int real_len) const {
  if (real_len < 2 || real_len > static_cast<int>(ids.size())) {
    throw InputError("class_probs: bad real_len");
  }
  const auto h0 = model_.embed(ids.first(real_len));
  const auto trace = model_.forward(h0, real_len);
  const auto probs = numcore::softmax_rows(model_.class_logits(trace));
  ClassProbs out{};
  for (int c = 0; c < 3; ++c) out[c] = probs(0, c);
  return out;
}

int argmax(const ClassProbs& p) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

}  // namespace mrp::encoder
