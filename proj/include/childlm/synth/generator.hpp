// Copyright 2026 The childlm Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic child-directed dialogue. A small topic-structured grammar with
// subject-verb agreement, family-specific style parameters and a Zipfian
// long tail of nonce nouns. Used for demos and for every quantitative check
// that needs corpora with known structure.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "childlm/corpus/dataset.hpp"

namespace childlm::synth {

struct FamilyProfile {
  std::string family_id = "fam-00";
  int child_age_months = 18;
  double topic_focus = 0.75;     // chance a noun slot uses the conversation topic
  double question_rate = 0.3;    // share of caregiver utterances that are questions
  double child_share = 0.25;     // share of utterances spoken by the target child
  double expansion_rate = 0.3;   // caregiver expands the child's previous words
  double marker_rate = 0.03;     // unintelligible / non-linguistic insertions
  double rare_word_rate = 0.15;  // noun slots drawn from the long tail
  double father_share = 0.3;     // caregiver turns by FAT instead of MOT
  double other_child_rate = 0.03;
  int mean_utterances = 14;
  std::uint64_t style_seed = 1;  // topic preferences
};

struct PairSpec {
  std::string id;
  std::string benchmark;
  std::string subtask;
  std::string good;
  std::string bad;
};

struct WordPairSpec {
  std::string word1;
  std::string word2;
  double score = 0.0;
};

enum class CdiCategory { kNoun, kVerb, kAdjective, kFunctionWord, kOther };

struct CdiWordSpec {
  std::string word;
  CdiCategory category = CdiCategory::kOther;
  double concreteness = 0.0;
};

class Generator {
 public:
  explicit Generator(std::uint64_t language_seed = 7, std::size_t tail_size = 1500);

  corpus::Conversation conversation(const FamilyProfile& family, std::uint64_t seed) const;

  // Conversations appended until the token count reaches `target_tokens`.
  std::vector<corpus::Conversation> conversations(const FamilyProfile& family,
                                                  std::size_t target_tokens,
                                                  std::uint64_t seed) const;
  corpus::Dataset dataset(const FamilyProfile& family, std::size_t target_tokens,
                          std::uint64_t seed) const;

  // `n` families with varied ages and style parameters.
  static std::vector<FamilyProfile> families(std::size_t n, std::uint64_t seed);

  // Minimal-pair suites shaped like grammar (zorro), property (comps) and
  // plausibility (ewok) benchmarks.
  std::vector<PairSpec> grammar_suite(std::size_t per_subtask, std::uint64_t seed) const;
  std::vector<PairSpec> property_suite(std::size_t per_subtask, std::uint64_t seed) const;
  std::vector<PairSpec> plausibility_suite(std::size_t per_subtask, std::uint64_t seed) const;

  // Human-like similarity judgments: same-topic pairs score high.
  std::vector<WordPairSpec> similarity_suite(std::size_t n_pairs, std::uint64_t seed) const;

  std::vector<CdiWordSpec> cdi_words() const;

  const std::vector<std::string>& topics() const { return topic_names_; }
  // Singular core nouns of one topic.
  std::vector<std::string> topic_nouns(std::size_t topic) const;

 private:
  struct Noun {
    std::string singular;
    std::string plural;
    std::size_t topic;
    bool core;
  };
  struct Verb {
    std::string third;  // runs
    std::string base;   // run
    std::size_t topic;  // npos: any topic
  };
  struct Adjective {
    std::string word;
    std::size_t topic;
  };

  friend class Realizer;

  std::vector<std::string> topic_names_;
  std::vector<Noun> nouns_;
  std::vector<std::vector<std::size_t>> core_by_topic_;
  std::vector<std::vector<std::size_t>> tail_by_topic_;
  std::vector<Verb> intransitive_;
  std::vector<Verb> transitive_;
  std::vector<Adjective> adjectives_;
  std::vector<std::string> child_names_;
};

}  // namespace childlm::synth
