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

#include "mrp/corpus/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mrp/errors.h"

namespace mrp::corpus {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kNormal:
      return "normal";
    case Label::kOffensive:
      return "offensive";
    case Label::kHatespeech:
      return "hatespeech";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view name) {
  if (name == "normal") return Label::kNormal;
  if (name == "offensive") return Label::kOffensive;
  if (name == "hatespeech" || name == "hate speech") return Label::kHatespeech;
  return std::nullopt;
}

void RawPost::validate() const {
  if (annotators.empty()) {
    throw InputError("post " + post_id + ": no annotators");
  }
  for (const auto& r : rationales) {
    if (r.size() != post_tokens.size()) {
      throw InputError("post " + post_id + ": rationale length " +
                       std::to_string(r.size()) + " != token count " +
                       std::to_string(post_tokens.size()));
    }
    for (int bit : r) {
      if (bit != 0 && bit != 1) {
        throw InputError("post " + post_id + ": rationale value " +
                         std::to_string(bit) + " is not 0/1");
      }
    }
  }
}

std::optional<Label> aggregate_label(std::span<const Label> labels) {
  if (labels.empty()) throw InputError("aggregate_label: no labels");
  std::array<int, kNumClasses> votes{};
  for (Label l : labels) ++votes[static_cast<int>(l)];
  for (int c = 0; c < kNumClasses; ++c) {
    if (2 * votes[c] > static_cast<int>(labels.size())) {
      return static_cast<Label>(c);
    }
  }
  return std::nullopt;
}

std::vector<std::uint8_t> aggregate_rationale(
    const std::vector<std::vector<int>>& rationales, int n_tokens) {
  std::vector<int> sums(n_tokens, 0);
  for (const auto& r : rationales) {
    if (static_cast<int>(r.size()) != n_tokens) {
      throw InputError("aggregate_rationale: vector of length " +
                       std::to_string(r.size()) + ", expected " +
                       std::to_string(n_tokens));
    }
    for (int i = 0; i < n_tokens; ++i) sums[i] += r[i];
  }
  // mean > 0.5  <=>  2 * sum > count, exactly.
  const int count = static_cast<int>(rationales.size());
  std::vector<std::uint8_t> out(n_tokens, 0);
  for (int i = 0; i < n_tokens; ++i) out[i] = 2 * sums[i] > count ? 1 : 0;
  return out;
}

std::vector<std::string> aggregate_targets(const RawPost& post,
                                           GroupRule rule) {
  std::map<std::string, int> votes;
  for (const auto& a : post.annotators) {
    std::set<std::string> unique(a.targets.begin(), a.targets.end());
    for (const auto& t : unique) ++votes[t];
  }
  std::vector<std::string> out;
  const int n = static_cast<int>(post.annotators.size());
  for (const auto& [t, v] : votes) {
    if (t == "None") continue;
    if (rule == GroupRule::kUnion || 2 * v > n) out.push_back(t);
  }
  return out;
}

std::optional<Label> post_label(const RawPost& post) {
  std::vector<Label> labels;
  labels.reserve(post.annotators.size());
  for (const auto& a : post.annotators) labels.push_back(a.label);
  return aggregate_label(labels);
}

Example encode(const RawPost& post, const Vocabulary& vocab, int max_len,
               GroupRule rule) {
  if (max_len < 3) throw InputError("max_len must be >= 3");
  post.validate();
  const auto label = post_label(post);
  if (!label) {
    throw InputError("post " + post.post_id + ": no majority label");
  }
  const int n_words = static_cast<int>(post.post_tokens.size());
  const auto word_bits =
      *label == Label::kNormal
          ? std::vector<std::uint8_t>(n_words, 0)
          : aggregate_rationale(post.rationales, n_words);

  const int kept = std::min(n_words, max_len - 2);
  Example ex;
  ex.id = post.post_id;
  ex.label = *label;
  ex.attention_len = kept + 2;
  ex.token_ids.assign(max_len, Vocabulary::kPad);
  ex.gold_rationale.assign(max_len, 0);
  ex.token_ids[0] = Vocabulary::kCls;
  for (int i = 0; i < kept; ++i) {
    ex.token_ids[i + 1] = vocab.id(post.post_tokens[i]);
    ex.gold_rationale[i + 1] = word_bits[i];
    ex.words.push_back(post.post_tokens[i]);
  }
  ex.token_ids[kept + 1] = Vocabulary::kSep;
  ex.target_groups = aggregate_targets(post, rule);
  return ex;
}

Splits split(std::span<const Example> examples,
             const SplitPartition& partition) {
  std::map<std::string, int> which;
  const std::vector<std::string>* lists[] = {&partition.train, &partition.val,
                                             &partition.test};
  for (int s = 0; s < 3; ++s) {
    for (const auto& id : *lists[s]) {
      if (!which.emplace(id, s).second) {
        throw InputError("split: id " + id + " listed more than once");
      }
    }
  }
  Splits out;
  std::vector<Example>* targets[] = {&out.train, &out.val, &out.test};
  for (const auto& ex : examples) {
    auto it = which.find(ex.id);
    if (it == which.end()) {
      throw InputError("split: id " + ex.id + " is in no split");
    }
    targets[it->second]->push_back(ex);
  }
  for (auto* t : targets) {
    std::sort(t->begin(), t->end(),
              [](const Example& a, const Example& b) { return a.id < b.id; });
  }
  return out;
}

IngestResult ingest(std::span<const RawPost> posts,
                    const SplitPartition& partition,
                    const IngestOptions& options) {
  IngestResult result;
  std::set<std::string> train_ids(partition.train.begin(),
                                  partition.train.end());
  std::vector<const RawPost*> kept;
  std::vector<RawPost> train_posts;
  for (const auto& post : posts) {
    post.validate();
    if (!post_label(post)) {
      result.exclusions.push_back({post.post_id, "no majority label"});
      continue;
    }
    kept.push_back(&post);
    if (train_ids.count(post.post_id)) train_posts.push_back(post);
  }
  result.vocab = Vocabulary::build(train_posts, options.min_freq);
  std::vector<Example> examples;
  examples.reserve(kept.size());
  for (const auto* post : kept) {
    examples.push_back(
        encode(*post, result.vocab, options.max_len, options.group_rule));
  }
  result.splits = split(examples, partition);
  return result;
}

// ---- file formats ----

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

namespace {

RawPost parse_post(const std::string& key, const nlohmann::json& j) {
  RawPost post;
  try {
    post.post_id = j.contains("post_id") ? j.at("post_id").get<std::string>()
                                         : key;
    post.post_tokens = j.at("post_tokens").get<std::vector<std::string>>();
    for (const auto& a : j.at("annotators")) {
      Annotation ann;
      const auto name = a.at("label").get<std::string>();
      const auto label = parse_label(name);
      if (!label) {
        throw InputError("post " + post.post_id + ": unknown label '" + name +
                         "'");
      }
      ann.label = *label;
      if (a.contains("target")) {
        ann.targets = a.at("target").get<std::vector<std::string>>();
      }
      post.annotators.push_back(std::move(ann));
    }
    if (j.contains("rationales")) {
      post.rationales = j.at("rationales").get<std::vector<std::vector<int>>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("post " + key + ": " + e.what());
  }
  post.validate();
  return post;
}

}  // namespace

std::vector<RawPost> parse_posts(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("dataset JSON must be an object");
  std::vector<RawPost> posts;
  for (const auto& [key, value] : j.items()) {
    posts.push_back(parse_post(key, value));
  }
  std::sort(posts.begin(), posts.end(), [](const auto& a, const auto& b) {
    return a.post_id < b.post_id;
  });
  return posts;
}

std::vector<RawPost> load_posts(const std::string& path) {
  return parse_posts(read_json_file(path));
}

nlohmann::json posts_to_json(std::span<const RawPost> posts) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& post : posts) {
    nlohmann::json annotators = nlohmann::json::array();
    for (const auto& a : post.annotators) {
      annotators.push_back(
          {{"label", label_name(a.label)}, {"target", a.targets}});
    }
    j[post.post_id] = {{"post_id", post.post_id},
                       {"post_tokens", post.post_tokens},
                       {"annotators", annotators},
                       {"rationales", post.rationales}};
  }
  return j;
}

SplitPartition parse_partition(const nlohmann::json& j) {
  SplitPartition p;
  try {
    p.train = j.at("train").get<std::vector<std::string>>();
    p.val = j.at("val").get<std::vector<std::string>>();
    p.test = j.at("test").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed split file: ") + e.what());
  }
  return p;
}

SplitPartition load_partition(const std::string& path) {
  return parse_partition(read_json_file(path));
}

nlohmann::json partition_to_json(const SplitPartition& p) {
  return {{"train", p.train}, {"val", p.val}, {"test", p.test}};
}

nlohmann::json example_to_json(const Example& ex) {
  return {{"id", ex.id},
          {"token_ids", ex.token_ids},
          {"attention_len", ex.attention_len},
          {"class", static_cast<int>(ex.label)},
          {"gold_rationale", ex.gold_rationale},
          {"target_groups", ex.target_groups},
          {"words", ex.words}};
}

Example example_from_json(const nlohmann::json& j) {
  Example ex;
  try {
    ex.id = j.at("id").get<std::string>();
    ex.token_ids = j.at("token_ids").get<std::vector<int>>();
    ex.attention_len = j.at("attention_len").get<int>();
    const int c = j.at("class").get<int>();
    if (c < 0 || c >= kNumClasses) throw InputError("bad class id");
    ex.label = static_cast<Label>(c);
    ex.gold_rationale = j.at("gold_rationale").get<std::vector<std::uint8_t>>();
    ex.target_groups = j.at("target_groups").get<std::vector<std::string>>();
    ex.words = j.at("words").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed example: ") + e.what());
  }
  if (ex.token_ids.size() != ex.gold_rationale.size() ||
      ex.attention_len < 2 ||
      ex.attention_len > static_cast<int>(ex.token_ids.size()) ||
      static_cast<int>(ex.words.size()) != ex.attention_len - 2) {
    throw InputError("example " + ex.id + ": inconsistent lengths");
  }
  return ex;
}

void write_examples_jsonl(std::ostream& out, const Splits& splits) {
  const std::pair<const char*, const std::vector<Example>*> parts[] = {
      {"train", &splits.train}, {"val", &splits.val}, {"test", &splits.test}};
  for (const auto& [name, list] : parts) {
    for (const auto& ex : *list) {
      auto j = example_to_json(ex);
      j["split"] = name;
      out << j.dump() << '\n';
    }
  }
}

Splits read_examples_jsonl(std::istream& in) {
  Splits splits;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError("examples line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (j.contains("provenance")) continue;
    const auto name = j.value("split", std::string());
    auto ex = example_from_json(j);
    if (name == "train") {
      splits.train.push_back(std::move(ex));
    } else if (name == "val") {
      splits.val.push_back(std::move(ex));
    } else if (name == "test") {
      splits.test.push_back(std::move(ex));
    } else {
      throw InputError("examples line " + std::to_string(line_no) +
                       ": unknown split '" + name + "'");
    }
  }
  return splits;
}

}  // namespace mrp::corpus
