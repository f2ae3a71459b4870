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

#ifndef MRP_CORPUS_CORPUS_H_
#define MRP_CORPUS_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrp/corpus/types.h"
#include "mrp/corpus/vocabulary.h"

namespace mrp::corpus {

// How per-annotator target lists become an example's groups.
enum class GroupRule {
  kUnion,     // any annotator named the group
  kMajority,  // more than half of the annotators named it
};

// Strict-majority label; nullopt when no label has more than half the
// votes. Throws InputError on an empty list.
std::optional<Label> aggregate_label(std::span<const Label> labels);

// Position i is 1 iff the mean over annotators is strictly above 0.5.
// An empty list yields all zeros. Throws InputError on a length mismatch.
std::vector<std::uint8_t> aggregate_rationale(
    const std::vector<std::vector<int>>& rationales, int n_tokens);

std::vector<std::string> aggregate_targets(const RawPost& post,
                                           GroupRule rule);

std::optional<Label> post_label(const RawPost& post);

// Encodes an aggregated post as [CLS] words [SEP] [PAD]..., truncating
// tail words (and their rationale bits) to fit max_len. OOV words become
// [UNK]. A normal post always carries an all-zero rationale. Throws
// InputError when the post has no majority label or max_len < 3.
Example encode(const RawPost& post, const Vocabulary& vocab, int max_len,
               GroupRule rule = GroupRule::kUnion);

struct SplitPartition {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct Splits {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
};

// Assigns examples by id, each split sorted by id. Ids listed in the
// partition but absent from `examples` are ignored. Throws InputError when
// an example id is in no split or a partition id is listed twice.
Splits split(std::span<const Example> examples,
             const SplitPartition& partition);

struct Exclusion {
  std::string post_id;
  std::string reason;
};

struct IngestOptions {
  int min_freq = 1;
  int max_len = 64;
  GroupRule group_rule = GroupRule::kUnion;
};

struct IngestResult {
  Vocabulary vocab;
  Splits splits;
  std::vector<Exclusion> exclusions;
};

// Aggregate, build the vocabulary from the train split, encode, split.
IngestResult ingest(std::span<const RawPost> posts,
                    const SplitPartition& partition,
                    const IngestOptions& options);

// ---- file formats ----

// HateXplain layout: {post_id: {post_id, post_tokens, annotators:[{label,
// target:[...]}], rationales:[[0/1...]...]}}. Posts come back sorted by id.
// Errors name the offending post_id.
std::vector<RawPost> parse_posts(const nlohmann::json& j);
std::vector<RawPost> load_posts(const std::string& path);
nlohmann::json posts_to_json(std::span<const RawPost> posts);

SplitPartition parse_partition(const nlohmann::json& j);
SplitPartition load_partition(const std::string& path);
nlohmann::json partition_to_json(const SplitPartition& partition);

nlohmann::json example_to_json(const Example& example);
Example example_from_json(const nlohmann::json& j);

// One JSON object per line, each tagged with its split name.
void write_examples_jsonl(std::ostream& out, const Splits& splits);
// Lines carrying a "provenance" key are skipped.
Splits read_examples_jsonl(std::istream& in);

nlohmann::json read_json_file(const std::string& path);

}  // namespace mrp::corpus

#endif  // MRP_CORPUS_CORPUS_H_
