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

#include "childlm/synth/generator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "childlm/common/rng.hpp"
#include "childlm/corpus/transcript.hpp"

namespace childlm::synth {
namespace {

constexpr std::size_t kAnyTopic = static_cast<std::size_t>(-1);

struct NounSeed {
  const char* singular;
  const char* plural;
};

const std::array<std::array<NounSeed, 8>, 6> kCoreNouns = {{
    {{{"dog", "dogs"}, {"cat", "cats"}, {"bird", "birds"}, {"cow", "cows"},
      {"duck", "ducks"}, {"horse", "horses"}, {"bunny", "bunnies"}, {"frog", "frogs"}}},
    {{{"apple", "apples"}, {"banana", "bananas"}, {"cookie", "cookies"},
      {"cracker", "crackers"}, {"egg", "eggs"}, {"carrot", "carrots"}, {"grape", "grapes"},
      {"berry", "berries"}}},
    {{{"ball", "balls"}, {"block", "blocks"}, {"doll", "dolls"}, {"puzzle", "puzzles"},
      {"bear", "bears"}, {"book", "books"}, {"balloon", "balloons"}, {"crayon", "crayons"}}},
    {{{"car", "cars"}, {"truck", "trucks"}, {"bus", "buses"}, {"train", "trains"},
      {"boat", "boats"}, {"plane", "planes"}, {"bike", "bikes"}, {"tractor", "tractors"}}},
    {{{"nose", "noses"}, {"hand", "hands"}, {"foot", "feet"}, {"ear", "ears"},
      {"eye", "eyes"}, {"toe", "toes"}, {"finger", "fingers"}, {"tummy", "tummies"}}},
    {{{"cup", "cups"}, {"spoon", "spoons"}, {"bowl", "bowls"}, {"chair", "chairs"},
      {"bed", "beds"}, {"door", "doors"}, {"shoe", "shoes"}, {"hat", "hats"}}},
}};

const char* const kTopicNames[] = {"animals", "food", "toys", "vehicles", "body", "household"};

struct VerbSeed {
  const char* third;
  const char* base;
  std::size_t topic;
};

const VerbSeed kIntransitive[] = {
    {"barks", "bark", 0},     {"sleeps", "sleep", 0},   {"swims", "swim", 0},
    {"hops", "hop", 0},       {"crumbles", "crumble", 1}, {"squishes", "squish", 1},
    {"rolls", "roll", 2},     {"bounces", "bounce", 2}, {"spins", "spin", 2},
    {"drives", "drive", 3},   {"honks", "honk", 3},     {"beeps", "beep", 3},
    {"hurts", "hurt", 4},     {"wiggles", "wiggle", 4}, {"itches", "itch", 4},
    {"breaks", "break", 5},   {"squeaks", "squeak", 5}, {"opens", "open", 5},
    {"goes", "go", kAnyTopic}, {"falls", "fall", kAnyTopic}, {"moves", "move", kAnyTopic},
};

const VerbSeed kTransitive[] = {
    {"wants", "want", kAnyTopic}, {"sees", "see", kAnyTopic},   {"likes", "like", kAnyTopic},
    {"needs", "need", kAnyTopic}, {"has", "have", kAnyTopic},   {"gets", "get", kAnyTopic},
    {"finds", "find", kAnyTopic}, {"holds", "hold", kAnyTopic}, {"pushes", "push", kAnyTopic},
    {"feeds", "feed", 0},         {"eats", "eat", 1},           {"throws", "throw", 2},
    {"rides", "ride", 3},         {"washes", "wash", 4},        {"fills", "fill", 5},
};

struct AdjSeed {
  const char* word;
  std::size_t topic;
};

const AdjSeed kAdjectives[] = {
    {"big", kAnyTopic},  {"little", kAnyTopic}, {"red", kAnyTopic}, {"blue", kAnyTopic},
    {"new", kAnyTopic},  {"pretty", kAnyTopic}, {"furry", 0},       {"soft", 0},
    {"yummy", 1},        {"hot", 1},            {"round", 2},       {"bouncy", 2},
    {"fast", 3},         {"loud", 3},           {"sore", 4},        {"tiny", 4},
    {"clean", 5},        {"wet", 5},
};

const char* const kChildNames[] = {"rosa", "max", "lily", "sam", "ella", "ben"};

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  return w;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.index(v.size())];
}

}  // namespace

// Turns templates into utterance text for one conversation.
class Realizer {
 public:
  Realizer(const Generator& g, const FamilyProfile& family, Rng& rng)
      : g_(g), family_(family), rng_(rng) {
    Rng style(derive_seed(family.style_seed, "topics"));
    for (std::size_t t = 0; t < g_.topic_names_.size(); ++t) {
      topic_weights_.push_back(std::exp(style.normal()));
    }
    topic_ = rng_.categorical(topic_weights_);
  }

  std::size_t slot_topic() {
    return rng_.bernoulli(family_.topic_focus) ? topic_ : rng_.categorical(topic_weights_);
  }

  const Generator::Noun& noun() {
    const std::size_t t = slot_topic();
    const auto& tail = g_.tail_by_topic_[t];
    if (!tail.empty() && rng_.bernoulli(family_.rare_word_rate)) {
      return g_.nouns_[tail[rng_.categorical(tail_weights(tail.size()))]];
    }
    const auto& core = g_.core_by_topic_[t];
    return g_.nouns_[core[rng_.categorical(core_weights(core.size()))]];
  }

  const Generator::Verb& verb(const std::vector<Generator::Verb>& pool, std::size_t topic) {
    std::vector<double> w;
    for (const auto& v : pool) {
      w.push_back(v.topic == topic ? 3.0 : (v.topic == kAnyTopic ? 1.0 : 0.08));
    }
    return pool[rng_.categorical(w)];
  }

  const std::string& adjective(std::size_t topic) {
    std::vector<double> w;
    for (const auto& a : g_.adjectives_) {
      w.push_back(a.topic == topic ? 3.0 : (a.topic == kAnyTopic ? 1.0 : 0.08));
    }
    return g_.adjectives_[rng_.categorical(w)].word;
  }

  std::string noun_phrase_word(const Generator::Noun& n) {
    return rng_.bernoulli(0.35) ? n.plural : n.singular;
  }

  std::string caregiver(bool question) {
    const auto& n = noun();
    const std::size_t t = n.topic;
    if (question) {
      switch (rng_.index(8)) {
        case 0: return fmt::format("Do you want the {}?", noun_phrase_word(n));
        case 1: return fmt::format("Where is the {}?", n.singular);
        case 2: return fmt::format("Where are the {}?", n.plural);
        case 3:
          return fmt::format("Can you {} the {}?", verb(g_.transitive_, t).base,
                             noun_phrase_word(n));
        case 4: return fmt::format("What does the {} do?", n.singular);
        case 5: return "What is that?";
        case 6: return fmt::format("Who wants a {}?", n.singular);
        default: return fmt::format("Is the {} {}?", n.singular, adjective(t));
      }
    }
    switch (rng_.index(12)) {
      case 0: return fmt::format("Look at the {}.", noun_phrase_word(n));
      case 1: return fmt::format("The {} {}.", n.singular, verb(g_.intransitive_, t).third);
      case 2: return fmt::format("The {} {}.", n.plural, verb(g_.intransitive_, t).base);
      case 3: return fmt::format("That is a {} {}.", adjective(t), n.singular);
      case 4:
        return fmt::format("We {} the {}.", verb(g_.transitive_, t).base, noun_phrase_word(n));
      case 5: return fmt::format("It is {}.", adjective(t));
      case 6: return "Good job!";
      case 7:
        return fmt::format("Let's {} the {}.", verb(g_.transitive_, t).base,
                           noun_phrase_word(n));
      case 8: return fmt::format("Oh, the {} is {}.", n.singular, adjective(t));
      case 9:
        return fmt::format("{}, look at the {}!",
                           capitalize(g_.child_names_[rng_.index(g_.child_names_.size())]),
                           n.plural);
      case 10: return fmt::format("I see a {} {}.", adjective(t), n.singular);
      default: {
        const auto& other = g_.nouns_[g_.core_by_topic_[5][rng_.index(8)]];
        return fmt::format("The {} is on the {}.", n.singular, other.singular);
      }
    }
  }

  std::string child() {
    const auto& n = noun();
    switch (rng_.index(9)) {
      case 0: return fmt::format("{}.", n.singular);
      case 1: return fmt::format("More {}.", n.singular);
      case 2: return fmt::format("{} {}.", adjective(n.topic), n.singular);
      case 3: return fmt::format("{} {}.", n.singular, verb(g_.intransitive_, n.topic).base);
      case 4: return "No.";
      case 5: return "Mine!";
      case 6: return "Uh oh.";
      case 7: return fmt::format("I want {}.", n.singular);
      default: return fmt::format("{}!", n.plural);
    }
  }

  // Repeats the child's words and adds one clause.
  std::string expansion(const std::string& child_text) {
    std::string core = child_text;
    while (!core.empty() && (core.back() == '.' || core.back() == '!' || core.back() == '?')) {
      core.pop_back();
    }
    std::string lowered = core;
    if (!lowered.empty() && lowered[0] >= 'A' && lowered[0] <= 'Z') {
      lowered[0] = static_cast<char>(lowered[0] - 'A' + 'a');
    }
    const auto& n = noun();
    return fmt::format("Yes, {}! The {} {}.", lowered, n.singular,
                       verb(g_.intransitive_, n.topic).third);
  }

  std::string add_markers(std::string text) {
    if (!rng_.bernoulli(family_.marker_rate)) return text;
    switch (rng_.index(6)) {
      case 0: return "Um, " + text;
      case 1: return "Uh, " + text;
      case 2: return text + " [laughs]";
      case 3: return "Xxx " + text;
      case 4: return "Ba- " + text;
      default: return text + " [noise]";
    }
  }

 private:
  std::vector<double> core_weights(std::size_t n) {
    if (core_w_.size() != n) core_w_ = zipf_weights(n, 1.0);
    return core_w_;
  }
  std::vector<double> tail_weights(std::size_t n) {
    if (tail_w_.size() != n) tail_w_ = zipf_weights(n, 1.05);
    return tail_w_;
  }

  const Generator& g_;
  const FamilyProfile& family_;
  Rng& rng_;
  std::vector<double> topic_weights_;
  std::size_t topic_ = 0;
  std::vector<double> core_w_;
  std::vector<double> tail_w_;
};

Generator::Generator(std::uint64_t language_seed, std::size_t tail_size) {
  for (const char* name : kTopicNames) topic_names_.emplace_back(name);
  core_by_topic_.resize(topic_names_.size());
  tail_by_topic_.resize(topic_names_.size());
  std::set<std::string> known;
  for (std::size_t t = 0; t < kCoreNouns.size(); ++t) {
    for (const auto& seed : kCoreNouns[t]) {
      core_by_topic_[t].push_back(nouns_.size());
      nouns_.push_back({seed.singular, seed.plural, t, true});
      known.insert(seed.singular);
      known.insert(seed.plural);
    }
  }
  for (const auto& v : kIntransitive) {
    intransitive_.push_back({v.third, v.base, v.topic});
    known.insert(v.third);
    known.insert(v.base);
  }
  for (const auto& v : kTransitive) {
    transitive_.push_back({v.third, v.base, v.topic});
    known.insert(v.third);
    known.insert(v.base);
  }
  for (const auto& a : kAdjectives) {
    adjectives_.push_back({a.word, a.topic});
    known.insert(a.word);
  }
  for (const char* n : kChildNames) child_names_.emplace_back(n);

  // Nonce long tail, assigned to topics round-robin after a seeded shuffle.
  static const char* const kOnsets[] = {"b", "bl", "d", "dr", "f", "g", "gl", "k", "l", "m",
                                        "n", "p", "pl", "r", "s", "sn", "t", "tr", "v", "w", "z"};
  static const char* const kVowels[] = {"a", "e", "i", "o", "u", "oo", "ee"};
  static const char* const kCodas[] = {"", "b", "ck", "d", "g", "k", "m", "n", "p", "t", "x",
                                       "sh", "mp", "nk"};
  Rng rng(derive_seed(language_seed, "tail"));
  std::vector<std::string> tail;
  std::size_t attempts = 0;
  while (tail.size() < tail_size && attempts < tail_size * 50) {
    ++attempts;
    std::string w;
    const std::size_t syllables = 1 + rng.index(2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[rng.index(std::size(kOnsets))];
      w += kVowels[rng.index(std::size(kVowels))];
      if (s + 1 == syllables || rng.bernoulli(0.3)) w += kCodas[rng.index(std::size(kCodas))];
    }
    if (w.size() < 3 || known.contains(w)) continue;
    const bool sibilant = w.ends_with("x") || w.ends_with("sh") || w.ends_with("s");
    std::string plural = w + (sibilant ? "es" : "s");
    if (known.contains(plural)) continue;
    known.insert(w);
    known.insert(plural);
    tail.push_back(w);
  }
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const std::size_t t = i % topic_names_.size();
    const auto& w = tail[i];
    const bool sibilant = w.ends_with("x") || w.ends_with("sh");
    tail_by_topic_[t].push_back(nouns_.size());
    nouns_.push_back({w, w + (sibilant ? "es" : "s"), t, false});
  }
}

corpus::Conversation Generator::conversation(const FamilyProfile& family,
                                             std::uint64_t seed) const {
  Rng rng(seed);
  Realizer r(*this, family, rng);
  const auto aliases = corpus::SpeakerAliases::defaults();
  corpus::Conversation conv;
  conv.family_id = family.family_id;
  conv.child_age_months = family.child_age_months;
  const int n = std::max(2, static_cast<int>(std::lround(family.mean_utterances *
                                                         rng.uniform(0.5, 1.5))));
  std::string prev_label;
  std::string prev_text;
  for (int i = 0; i < n; ++i) {
    std::string label;
    std::string text;
    const bool after_child = prev_label == "CHI";
    if (rng.bernoulli(family.child_share) && !after_child) {
      label = "CHI";
      text = rng.bernoulli(family.marker_rate) ? "Xxx." : r.child();
    } else if (rng.bernoulli(family.other_child_rate)) {
      label = "OCHI";
      text = r.child();
    } else {
      label = rng.bernoulli(family.father_share) ? "FAT" : "MOT";
      if (after_child && prev_text != "Xxx." && rng.bernoulli(family.expansion_rate)) {
        text = r.expansion(prev_text);
      } else {
        text = r.add_markers(r.caregiver(rng.bernoulli(family.question_rate)));
      }
    }
    text = capitalize(std::move(text));
    conv.utterances.push_back(corpus::make_utterance(label, text, aliases));
    prev_label = std::move(label);
    prev_text = std::move(text);
  }
  return conv;
}

std::vector<corpus::Conversation> Generator::conversations(const FamilyProfile& family,
                                                           std::size_t target_tokens,
                                                           std::uint64_t seed) const {
  std::vector<corpus::Conversation> out;
  std::size_t tokens = 0;
  std::uint64_t i = 0;
  while (tokens < target_tokens) {
    out.push_back(conversation(family, derive_seed(seed, fmt::format("conv-{}", i++))));
    tokens += out.back().token_count();
  }
  return out;
}

corpus::Dataset Generator::dataset(const FamilyProfile& family, std::size_t target_tokens,
                                   std::uint64_t seed) const {
  return corpus::Dataset(family.family_id, conversations(family, target_tokens, seed));
}

std::vector<FamilyProfile> Generator::families(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "families"));
  std::vector<FamilyProfile> out;
  for (std::size_t i = 0; i < n; ++i) {
    FamilyProfile f;
    f.family_id = fmt::format("fam-{:02}", i + 1);
    f.child_age_months = 5 + static_cast<int>(rng.index(34));
    f.topic_focus = rng.uniform(0.55, 0.9);
    f.question_rate = rng.uniform(0.15, 0.45);
    f.child_share = rng.uniform(0.1, 0.35);
    f.expansion_rate = rng.uniform(0.05, 0.5);
    f.marker_rate = rng.uniform(0.0, 0.08);
    f.rare_word_rate = rng.uniform(0.05, 0.3);
    f.father_share = rng.uniform(0.1, 0.5);
    f.mean_utterances = 8 + static_cast<int>(rng.index(14));
    f.style_seed = rng.next();
    out.push_back(f);
  }
  return out;
}

std::vector<std::string> Generator::topic_nouns(std::size_t topic) const {
  std::vector<std::string> out;
  for (std::size_t i : core_by_topic_.at(topic)) out.push_back(nouns_[i].singular);
  return out;
}

std::vector<PairSpec> Generator::grammar_suite(std::size_t per_subtask,
                                               std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "grammar-suite"));
  std::vector<PairSpec> out;
  auto core_noun = [&]() -> const Noun& {
    const auto& topic = core_by_topic_[rng.index(core_by_topic_.size())];
    return nouns_[topic[rng.index(topic.size())]];
  };
  auto add = [&](const char* subtask, std::size_t i, std::string good, std::string bad) {
    out.push_back({fmt::format("zorro-{}-{}", subtask, i), "zorro", subtask,
                   capitalize(std::move(good)), capitalize(std::move(bad))});
  };
  for (std::size_t i = 0; i < per_subtask; ++i) {
    const auto& n = core_noun();
    const auto& v = pick(intransitive_, rng);
    add("agreement_subject_verb-singular", i, fmt::format("the {} {}.", n.singular, v.third),
        fmt::format("the {} {}.", n.singular, v.base));
  }
  for (std::size_t i = 0; i < per_subtask; ++i) {
    const auto& n = core_noun();
    const auto& v = pick(intransitive_, rng);
    add("agreement_subject_verb-plural", i, fmt::format("the {} {}.", n.plural, v.base),
        fmt::format("the {} {}.", n.plural, v.third));
  }
  for (std::size_t i = 0; i < per_subtask; ++i) {
    const auto& n = core_noun();
    add("agreement_copula", i, fmt::format("where is the {}?", n.singular),
        fmt::format("where are the {}?", n.singular));
  }
  for (std::size_t i = 0; i < per_subtask; ++i) {
    const auto& n = core_noun();
    add("word_order", i, fmt::format("look at the {}.", n.singular),
        fmt::format("look the at {}.", n.singular));
  }
  for (std::size_t i = 0; i < per_subtask; ++i) {
    const auto& n = core_noun();
    const auto& a = pick(adjectives_, rng);
    add("determiner_number", i, fmt::format("that is a {} {}.", a.word, n.singular),
        fmt::format("that is a {} {}.", a.word, n.plural));
  }
  return out;
}

std::vector<PairSpec> Generator::property_suite(std::size_t per_subtask,
                                                std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "property-suite"));
  std::vector<PairSpec> out;
  for (std::size_t t = 0; t < topic_names_.size(); ++t) {
    std::vector<const Verb*> own, foreign;
    for (const auto& v : intransitive_) {
      if (v.topic == t) own.push_back(&v);
      else if (v.topic != kAnyTopic) foreign.push_back(&v);
    }
    for (std::size_t i = 0; i < per_subtask; ++i) {
      const auto& n = nouns_[core_by_topic_[t][rng.index(core_by_topic_[t].size())]];
      const Verb* good = own[rng.index(own.size())];
      const Verb* bad = foreign[rng.index(foreign.size())];
      out.push_back({fmt::format("comps-{}-{}", topic_names_[t], i), "comps", topic_names_[t],
                     capitalize(fmt::format("the {} {}.", n.singular, good->third)),
                     capitalize(fmt::format("the {} {}.", n.singular, bad->third))});
    }
  }
  return out;
}

std::vector<PairSpec> Generator::plausibility_suite(std::size_t per_subtask,
                                                    std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "plausibility-suite"));
  std::vector<PairSpec> out;
  for (std::size_t t = 0; t < topic_names_.size(); ++t) {
    std::vector<const Adjective*> own;
    for (const auto& a : adjectives_) {
      if (a.topic == t) own.push_back(&a);
    }
    for (std::size_t i = 0; i < per_subtask; ++i) {
      std::size_t other = rng.index(topic_names_.size() - 1);
      if (other >= t) ++other;
      const auto& good_n = nouns_[core_by_topic_[t][rng.index(core_by_topic_[t].size())]];
      const auto& bad_n = nouns_[core_by_topic_[other][rng.index(core_by_topic_[other].size())]];
      const auto* adj = own[rng.index(own.size())];
      out.push_back({fmt::format("ewok-{}-{}", topic_names_[t], i), "ewok",
                     "physical-" + topic_names_[t],
                     capitalize(fmt::format("the {} is {}.", good_n.singular, adj->word)),
                     capitalize(fmt::format("the {} is {}.", bad_n.singular, adj->word))});
    }
  }
  return out;
}

std::vector<WordPairSpec> Generator::similarity_suite(std::size_t n_pairs,
                                                      std::uint64_t seed) const {
  Rng rng(derive_seed(seed, "similarity-suite"));
  std::vector<WordPairSpec> out;
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::size_t attempts = 0;
  while (out.size() < n_pairs && attempts++ < n_pairs * 100) {
    const std::size_t t1 = rng.index(core_by_topic_.size());
    const bool same = rng.bernoulli(0.5);
    std::size_t t2 = t1;
    if (!same) {
      t2 = rng.index(core_by_topic_.size() - 1);
      if (t2 >= t1) ++t2;
    }
    const std::size_t a = core_by_topic_[t1][rng.index(8)];
    const std::size_t b = core_by_topic_[t2][rng.index(8)];
    if (a == b || used.contains({std::min(a, b), std::max(a, b)})) continue;
    used.insert({std::min(a, b), std::max(a, b)});
    const double score = same ? 6.5 + 3.0 * rng.uniform() : 0.5 + 3.0 * rng.uniform();
    out.push_back({nouns_[a].singular, nouns_[b].singular, std::round(score * 100) / 100});
  }
  return out;
}

std::vector<CdiWordSpec> Generator::cdi_words() const {
  std::vector<CdiWordSpec> out;
  auto jitter = [](std::string_view w, double lo, double hi) {
    const double u = static_cast<double>(fnv1a64(w) % 1000) / 999.0;
    return std::round((lo + (hi - lo) * u) * 100) / 100;
  };
  for (const auto& topic : core_by_topic_) {
    for (std::size_t i : topic) {
      out.push_back({nouns_[i].singular, CdiCategory::kNoun, jitter(nouns_[i].singular, 4.3, 5.0)});
    }
  }
  std::set<std::string> seen;
  for (const auto* pool : {&intransitive_, &transitive_}) {
    for (const auto& v : *pool) {
      if (seen.insert(v.base).second) {
        out.push_back({v.base, CdiCategory::kVerb, jitter(v.base, 2.8, 4.2)});
      }
    }
  }
  for (const auto& a : adjectives_) {
    out.push_back({a.word, CdiCategory::kAdjective, jitter(a.word, 2.4, 4.0)});
  }
  for (const char* w : {"the", "a", "you", "is", "where", "what", "more", "that", "it", "we",
                        "on", "at", "can", "do"}) {
    out.push_back({w, CdiCategory::kFunctionWord, jitter(w, 1.2, 2.3)});
  }
  for (const char* w : {"yes", "no", "mine", "oh", "good", "look"}) {
    out.push_back({w, CdiCategory::kOther, jitter(w, 2.0, 3.2)});
  }
  return out;
}

}  // namespace childlm::synth
