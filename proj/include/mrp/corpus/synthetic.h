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

#ifndef MRP_CORPUS_SYNTHETIC_H_
#define MRP_CORPUS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mrp/corpus/corpus.h"

namespace mrp::corpus {

// Generated HateXplain-format corpora with known ground truth. Every post
// has three annotators who agree on the label and target group; one of
// them occasionally flips a rationale bit, which majority aggregation
// removes. Posts are split 8:1:1 by a seeded shuffle of the ids.
struct SyntheticCorpus {
  std::vector<RawPost> posts;
  SplitPartition partition;
};

// Hate speech iff a lexicon word is present; the rationale marks exactly
// the lexicon positions. Filler words are "w000".., lexicon words "lex0"..
struct LexiconCorpusOptions {
  int n_posts = 2000;
  int vocab_size = 200;  // filler + lexicon words
  int n_lexicon = 10;
  int min_words = 6;
  int max_words = 14;
  double toxic_fraction = 0.5;
  std::uint64_t seed = 1;
};

SyntheticCorpus make_lexicon_corpus(const LexiconCorpusOptions& options);

// Context-dependent toxicity. Trigger words ("trig*") are hateful only
// next to a context word ("ctx*") somewhere in the post: such posts are
// hate speech and both word kinds are rationale. Posts with a profanity
// word ("prof*") and no trigger/context pair are offensive, with the
// profanity as rationale. Lone triggers or context words also appear in
// normal posts.
struct ContextCorpusOptions {
  int n_posts = 1200;
  int vocab_size = 120;
  int n_triggers = 4;
  int n_contexts = 4;
  int n_profanity = 4;
  int min_words = 6;
  int max_words = 12;
  std::uint64_t seed = 1;
};

SyntheticCorpus make_context_corpus(const ContextCorpusOptions& options);

}  // namespace mrp::corpus

#endif  // MRP_CORPUS_SYNTHETIC_H_
