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

#include "mrp/corpus/synthetic.h"

#include <algorithm>
#include <cstdio>

#include "mrp/errors.h"
#include "mrp/numcore/rng.h"

namespace mrp::corpus {
namespace {

using numcore::Rng;

std::string numbered(const char* prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, i);
  return buf;
}

// Distinct positions in [0, n), ascending.
std::vector<int> pick_positions(int n, int count, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RawPost make_post(std::string id, std::vector<std::string> words,
                  const std::vector<int>& marks, Label label,
                  const std::string& group, Rng& rng) {
  RawPost post;
  post.post_id = std::move(id);
  post.post_tokens = std::move(words);
  for (int a = 0; a < 3; ++a) {
    post.annotators.push_back({label, {group}});
  }
  if (label != Label::kNormal) {
    for (int a = 0; a < 3; ++a) post.rationales.push_back(marks);
    // One annotator disagrees on one token now and then.
    if (rng.uniform() < 0.2) {
      const auto pos = rng.uniform_int(post.post_tokens.size());
      post.rationales[2][pos] ^= 1;
    }
  }
  return post;
}

SplitPartition partition_ids(const std::vector<RawPost>& posts, Rng rng) {
  std::vector<std::string> ids;
  for (const auto& p : posts) ids.push_back(p.post_id);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[rng.uniform_int(i)]);
  }
  const std::size_t n_train = ids.size() * 8 / 10;
  const std::size_t n_val = ids.size() / 10;
  SplitPartition p;
  p.train.assign(ids.begin(), ids.begin() + n_train);
  p.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  p.test.assign(ids.begin() + n_train + n_val, ids.end());
  for (auto* v : {&p.train, &p.val, &p.test}) std::sort(v->begin(), v->end());
  return p;
}

std::string random_group(Rng& rng) {
  return std::string(kTargetGroups[rng.uniform_int(kTargetGroups.size())]);
}

}  // namespace

SyntheticCorpus make_lexicon_corpus(const LexiconCorpusOptions& o) {
  if (o.n_lexicon < 1 || o.vocab_size <= o.n_lexicon || o.min_words < 2 ||
      o.max_words < o.min_words) {
    throw InputError("invalid lexicon corpus options");
  }
  Rng root(o.seed);
  Rng rng = root.derive("lexicon-posts");
  const int n_filler = o.vocab_size - o.n_lexicon;
  SyntheticCorpus corpus;
  for (int p = 0; p < o.n_posts; ++p) {
    const int len = o.min_words + static_cast<int>(rng.uniform_int(
                                      o.max_words - o.min_words + 1));
    std::vector<std::string> words;
    for (int i = 0; i < len; ++i) {
      words.push_back(numbered("w", static_cast<int>(rng.uniform_int(n_filler)), 3));
    }
    std::vector<int> marks(len, 0);
    const bool toxic = rng.uniform() < o.toxic_fraction;
    if (toxic) {
      const int n_lex = 1 + static_cast<int>(rng.uniform_int(2));
      for (int pos : pick_positions(len, n_lex, rng)) {
        words[pos] = numbered("lex", static_cast<int>(rng.uniform_int(o.n_lexicon)), 1);
        marks[pos] = 1;
      }
    }
    corpus.posts.push_back(make_post(numbered("p", p, 5), std::move(words),
                                     marks,
                                     toxic ? Label::kHatespeech : Label::kNormal,
                                     random_group(rng), rng));
  }
  corpus.partition = partition_ids(corpus.posts, root.derive("lexicon-split"));
  return corpus;
}

SyntheticCorpus make_context_corpus(const ContextCorpusOptions& o) {
  const int n_special = o.n_triggers + o.n_contexts + o.n_profanity;
  if (o.n_triggers < 1 || o.n_contexts < 1 || o.n_profanity < 1 ||
      o.vocab_size <= n_special || o.min_words < 3 ||
      o.max_words < o.min_words) {
    throw InputError("invalid context corpus options");
  }
  Rng root(o.seed);
  Rng rng = root.derive("context-posts");
  const int n_filler = o.vocab_size - n_special;
  auto trigger = [&] { return numbered("trig", static_cast<int>(rng.uniform_int(o.n_triggers)), 1); };
  auto context = [&] { return numbered("ctx", static_cast<int>(rng.uniform_int(o.n_contexts)), 1); };
  auto profanity = [&] { return numbered("prof", static_cast<int>(rng.uniform_int(o.n_profanity)), 1); };

  SyntheticCorpus corpus;
  for (int p = 0; p < o.n_posts; ++p) {
    const int len = o.min_words + static_cast<int>(rng.uniform_int(
                                      o.max_words - o.min_words + 1));
    std::vector<std::string> words;
    for (int i = 0; i < len; ++i) {
      words.push_back(numbered("w", static_cast<int>(rng.uniform_int(n_filler)), 3));
    }
    std::vector<int> marks(len, 0);
    const auto kind = rng.uniform_int(3);
    Label label = Label::kNormal;
    if (kind == 0) {
      label = Label::kHatespeech;
      const auto pos = pick_positions(len, 2, rng);
      const bool trigger_first = rng.uniform() < 0.5;
      words[pos[0]] = trigger_first ? trigger() : context();
      words[pos[1]] = trigger_first ? context() : trigger();
      marks[pos[0]] = marks[pos[1]] = 1;
    } else if (kind == 1) {
      label = Label::kOffensive;
      const auto distractor = rng.uniform_int(3);  // none, trigger, context
      const auto pos = pick_positions(len, distractor == 0 ? 1 : 2, rng);
      words[pos[0]] = profanity();
      marks[pos[0]] = 1;
      if (distractor == 1) words[pos[1]] = trigger();
      if (distractor == 2) words[pos[1]] = context();
    } else {
      const auto distractor = rng.uniform_int(3);
      if (distractor != 0) {
        const auto pos = pick_positions(len, 1, rng);
        words[pos[0]] = distractor == 1 ? trigger() : context();
      }
    }
    corpus.posts.push_back(make_post(numbered("c", p, 5), std::move(words),
                                     marks, label, random_group(rng), rng));
  }
  corpus.partition = partition_ids(corpus.posts, root.derive("context-split"));
  return corpus;
}

}  // namespace mrp::corpus
