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

#include <cmath>
#include <map>
#include <set>

#include "childlm/common/io.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/features/features.hpp"
#include "childlm/features/pos.hpp"
#include "childlm/synth/generator.hpp"
#include "doctest.h"
#include "json.hpp"
#include "testing.hpp"

using namespace childlm;
using namespace childlm::features;
using childlm::testing::TempDir;

namespace {

using Turns = std::vector<std::pair<std::string, std::string>>;

corpus::Dataset one(const Turns& turns, const std::string& name = "d") {
  return corpus::Dataset(name, {testing::conversation(turns)});
}

double brute_entropy(const std::vector<std::string>& events) {
  std::map<std::string, double> c;
  for (const auto& e : events) c[e] += 1;
  double h = 0;
  for (const auto& [k, v] : c) h -= v / events.size() * std::log2(v / events.size());
  return h;
}

// Mutual information of adjacent pairs from the enumerated pair list, with
// marginals counted over the first and second positions.
double brute_pair_mi(const std::vector<std::string>& t) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) pairs.emplace_back(t[i], t[i + 1]);
  const double n = static_cast<double>(pairs.size());
  double mi = 0;
  std::set<std::pair<std::string, std::string>> seen(pairs.begin(), pairs.end());
  for (const auto& [x, y] : seen) {
    double cxy = 0, cx = 0, cy = 0;
    for (const auto& [a, b] : pairs) {
      cxy += (a == x && b == y);
      cx += (a == x);
      cy += (b == y);
    }
    mi += cxy / n * std::log2((cxy / n) / ((cx / n) * (cy / n)));
  }
  return mi;
}

double brute_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::log2(p[i] / q[i]);
  return s;
}

}  // namespace

TEST_CASE("catalog names are unique and sets reject unknown names") {
  std::set<std::string> names;
  for (const auto& f : feature_catalog()) CHECK(names.insert(f.name).second);
  CHECK(names.size() >= 45);
  FeatureVector fv("x");
  CHECK_THROWS_AS(fv.set("nope", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fv.set("ttr", std::nan("")), std::invalid_argument);
}

TEST_CASE("unigram entropy of a uniform four-type corpus is two bits") {
  const auto fv = lexical_features(one({{"MOT", "a b c d a b c d"}}));
  CHECK(*fv.get("unigram_entropy") == doctest::Approx(2.0));
  CHECK(*fv.get("ttr") == 0.5);
  CHECK(*fv.get("token_count") == 8);
}

TEST_CASE("pair mutual information of a b a b a b") {
  const auto fv = lexical_features(one({{"MOT", "a b a b a b"}}));
  const double oracle = brute_pair_mi({"a", "b", "a", "b", "a", "b"});
  CHECK(std::abs(*fv.get("bigram_mutual_information") - oracle) < 1e-12);
  // Five pairs ab ba ab ba ab: MI equals the binary entropy of 3/5.
  const double h = -(0.6 * std::log2(0.6) + 0.4 * std::log2(0.4));
  CHECK(oracle == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("pair mutual information matches the oracle on random text") {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::string> t;
    std::string text;
    for (int i = 0; i < 60; ++i) {
      t.push_back(std::string(1, static_cast<char>('a' + rng.index(5))));
      text += t.back() + " ";
    }
    const auto fv = lexical_features(one({{"MOT", text}}));
    CHECK(std::abs(*fv.get("bigram_mutual_information") - brute_pair_mi(t)) < 1e-12);
    CHECK(std::abs(*fv.get("unigram_entropy") - brute_entropy(t)) < 1e-12);
  }
}

TEST_CASE("hapax ratio and small-corpus omissions") {
  CHECK(*lexical_features(one({{"MOT", "a a b"}})).get("hapax_ratio") == 0.5);
  const auto tiny = lexical_features(one({{"MOT", "a"}}));
  CHECK_FALSE(tiny.has("unigram_entropy"));
  CHECK_FALSE(tiny.has("bigram_mutual_information"));
  CHECK_FALSE(tiny.has("trigram_entropy"));
  CHECK(tiny.get("hapax_ratio") == 1.0);
}

TEST_CASE("mattr falls back to ttr and averages windows") {
  FeatureOptions opts;
  opts.mattr_window = 3;
  const auto fv = lexical_features(one({{"MOT", "a a b c"}}), opts);
  // Windows [a a b] and [a b c].
  CHECK(*fv.get("mattr") == doctest::Approx((2.0 / 3 + 1.0) / 2));
  opts.mattr_window = 50;
  const auto short_fv = lexical_features(one({{"MOT", "a a b c"}}), opts);
  CHECK(*short_fv.get("mattr") == *short_fv.get("ttr"));
}

TEST_CASE("zipf slope of exact power law") {
  // Counts 12, 6, 4, 3: c = 12 / r.
  const auto fv = lexical_features(
      one({{"MOT", "a a a a a a a a a a a a b b b b b b c c c c d d d"}}));
  CHECK(*fv.get("zipf_slope") == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pos tagger rules") {
  const auto& t = PosTagger::default_tagger();
  const std::vector<std::string> s = {"the", "oven"};
  const auto r = t.tag(s);
  CHECK(r.tags == std::vector<PosTag>{PosTag::kDet, PosTag::kNoun});
  CHECK(r.parse_eligible);
  const std::vector<std::string> punct = {".", "?"};
  const auto p = t.tag(punct);
  CHECK(p.tags == std::vector<PosTag>{PosTag::kPunct, PosTag::kPunct});
  CHECK_FALSE(p.parse_eligible);
  CHECK(t.tag_token("blicket") == PosTag::kX);
  CHECK(t.tag_token("jumping") == PosTag::kVerb);
  CHECK(t.tag_token("42") == PosTag::kNum);
  PosTagger custom({{"wug", PosTag::kNoun}}, {});
  CHECK(custom.tag_token("wug") == PosTag::kNoun);
  CHECK(custom.tag_token("jumping") == PosTag::kX);
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    CHECK(parse_tag(tag_name(static_cast<PosTag>(i))) == static_cast<PosTag>(i));
  }
}

TEST_CASE("pos lexicon file") {
  TempDir dir("pos");
  write_file_atomic(dir / "lex.tsv", "# comment\nwug\tNOUN\n");
  CHECK(PosTagger::load_lexicon(dir / "lex.tsv").at("wug") == PosTag::kNoun);
  write_file_atomic(dir / "bad.tsv", "wug\tTHING\n");
  CHECK_THROWS_AS(PosTagger::load_lexicon(dir / "bad.tsv"), UserError);
}

TEST_CASE("syntactic features on fixtures") {
  PosTagger nouns({{"a", PosTag::kNoun}}, {});
  const auto d = one({{"MOT", "a a a a"}, {"CHI", "a a"}});
  const auto fv = syntactic_features(d, tag_dataset(d, nouns));
  CHECK(*fv.get("pos_bigram_entropy") == 0.0);
  CHECK(*fv.get("pos_prop_noun") == 1.0);
  CHECK(*fv.get("total_parse_eligible") == 2);
  CHECK(*fv.get("pos_bigram_diversity") == doctest::Approx(1.0 / 144));

  const auto& t = PosTagger::default_tagger();
  const auto care = one({{"MOT", "the dog is very big"}, {"FAT", "the cat can run fast"},
                         {"CHI", "blicket dog"}});
  const auto tagged = tag_dataset(care, t);
  for (const auto& u : tagged[0]) {
    if (&u == &tagged[0][2]) break;
    for (auto tag : u.tags) REQUIRE(tag != PosTag::kX);
  }
  const auto cf = syntactic_features(care, tagged);
  CHECK(*cf.get("caregiver_pos_token_count") == 10);
  CHECK(*cf.get("child_pos_token_count") == 1);
  CHECK(*cf.get("total_parse_eligible") == 3);
}

TEST_CASE("pos bigram entropy matches brute force") {
  const auto d = synth::Generator(4).dataset(synth::FamilyProfile{}, 2000, 3);
  const auto tagged = tag_dataset(d, PosTagger::default_tagger());
  std::vector<std::string> events;
  for (const auto& conv : tagged) {
    for (const auto& u : conv) {
      for (std::size_t i = 0; i + 1 < u.tags.size(); ++i) {
        events.push_back(std::string(tag_name(u.tags[i])) + "|" + std::string(tag_name(u.tags[i + 1])));
      }
    }
  }
  const auto fv = syntactic_features(d, tagged);
  CHECK(std::abs(*fv.get("pos_bigram_entropy") - brute_entropy(events)) < 1e-12);
}

TEST_CASE("conversational features") {
  const auto alt = one({{"MOT", "hi"}, {"CHI", "hi"}, {"MOT", "ball"}, {"CHI", "ball"}});
  const auto a = conversational_features(alt);
  CHECK(*a.get("speaker_switch_rate") == 1.0);
  CHECK(*a.get("question_rate") == 0.0);
  CHECK(*a.get("turns_per_conversation") == 4);

  const auto exp = conversational_features(
      one({{"CHI", "ball"}, {"MOT", "the ball rolls"}, {"CHI", "dog run"}, {"MOT", "a dog ."},
           {"CHI", "."}, {"FAT", "what is it ?"}}));
  // The third child turn has no words, so two chances and one hit.
  CHECK(*exp.get("expansion_rate") == 0.5);
  CHECK(*exp.get("question_rate") == doctest::Approx(1.0 / 6));
  CHECK(*exp.get("wh_question_rate") == doctest::Approx(1.0 / 6));
  CHECK(*exp.get("child_token_share") + *exp.get("caregiver_token_share") == doctest::Approx(1.0));
}

TEST_CASE("divergences against direct summation") {
  const auto p = one({{"MOT", "a a a a b"}}, "p");
  const auto q = one({{"MOT", "a b b b c"}}, "q");
  const corpus::Dataset universe[] = {p, q};
  const auto fp = divergence_features(p, universe);
  const auto fq = divergence_features(q, universe);
  // Add-0.5 over the union {a, b, c}.
  const std::vector<double> pp = {4.5 / 6.5, 1.5 / 6.5, 0.5 / 6.5};
  const std::vector<double> qq = {1.5 / 6.5, 3.5 / 6.5, 1.5 / 6.5};
  CHECK(std::abs(*fp.get("mean_kl_from_others") - brute_kl(pp, qq)) < 1e-12);
  CHECK(std::abs(*fq.get("mean_kl_from_others") - brute_kl(qq, pp)) < 1e-12);
  CHECK(*fp.get("mean_kl_from_others") != doctest::Approx(*fq.get("mean_kl_from_others")));
  CHECK(*fp.get("mean_js_from_others") == doctest::Approx(*fq.get("mean_js_from_others")));

  const auto twin = p.renamed("twin");
  const corpus::Dataset same[] = {p, twin};
  CHECK(*divergence_features(p, same).get("mean_kl_from_others") == 0.0);
  const corpus::Dataset alone[] = {p};
  CHECK_FALSE(divergence_features(p, alone).has("mean_kl_from_others"));
}

TEST_CASE("js divergence never exceeds one bit") {
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(5), q(5);
    double sp = 0, sq = 0;
    for (int i = 0; i < 5; ++i) {
      p[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
      q[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
      sp += p[i];
      sq += q[i];
    }
    if (sp == 0 || sq == 0) continue;
    for (int i = 0; i < 5; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    const double js = js_divergence_bits(p, q);
    CHECK(js >= 0.0);
    CHECK(js <= 1.0);
  }
  const std::vector<double> a = {1, 0}, b = {0, 1};
  CHECK(js_divergence_bits(a, b) == doctest::Approx(1.0));
  CHECK(kl_divergence_bits(a, a) == 0.0);
}

TEST_CASE("semantic features") {
  const auto train = synth::Generator(2).dataset(synth::FamilyProfile{}, 6000, 1);
  const auto emb = learners::EmbeddingModel::train(train, {.dim = 8});
  const auto echo = one({{"MOT", "the dog"}, {"CHI", "the dog"}, {"MOT", "the dog"}});
  const auto fv = semantic_features(echo, emb);
  CHECK(*fv.get("adjacent_turn_similarity") == doctest::Approx(1.0));
  CHECK(*fv.get("child_to_caregiver_semantic_pair_count") == 1);

  const auto no_child = one({{"MOT", "the dog"}, {"FAT", "the cat"}});
  CHECK(*semantic_features(no_child, emb).get("child_to_caregiver_semantic_pair_count") == 0);

  const auto three = one({{"CHI", "dog"}, {"MOT", "the dog"}, {"CHI", "zzqx qqzx"},
                          {"MOT", "the cat"}, {"CHI", "cat"}, {"FAT", "a cat"}});
  CHECK(*semantic_features(three, emb).get("child_to_caregiver_semantic_pair_count") == 2);
}

TEST_CASE("quality features") {
  std::string text;
  for (int i = 0; i < 98; ++i) text += "word ";
  const auto fv = quality_features(one({{"MOT", text + "xxx xxx"}}));
  CHECK(*fv.get("unintelligible_rate") == doctest::Approx(0.02));
  CHECK(*fv.get("non_linguistic_rate") == 0.0);
  const auto clean = quality_features(one({{"MOT", "a b c"}}));
  CHECK(*clean.get("unintelligible_rate") == 0.0);
  CHECK(*clean.get("partial_word_rate") == 0.0);
  FeatureOptions opts;
  opts.unintelligible = {"word"};
  CHECK(*quality_features(one({{"MOT", text + "xxx xxx"}}), opts).get("unintelligible_rate") ==
        doctest::Approx(0.98));
  CHECK(*quality_features(one({{"MOT", "ba- ball"}})).get("partial_word_rate") == 0.5);
}

TEST_CASE("mixture metadata") {
  auto a = testing::conversation({{"MOT", "hi"}}, "a");
  auto b = testing::conversation({{"MOT", "hi"}}, "b");
  a.child_age_months = 5;
  b.child_age_months = 31;
  const corpus::Dataset d("m", {a, b});
  const auto fv = mixture_metadata(d);
  CHECK(*fv.get("n_families") == 2);
  CHECK(*fv.get("age_mean") == 18);
  CHECK(*fv.get("age_range") == 26);
  CHECK(*mixture_metadata(corpus::Dataset("s", {a})).get("n_families") == 1);
  CHECK_FALSE(mixture_metadata(one({{"MOT", "x"}})).has("age_mean"));
}

TEST_CASE("feature csv round trip keeps absent cells empty") {
  TempDir dir("feat");
  FeatureVector a("a"), b("b");
  a.set("ttr", 0.5);
  a.set("mattr", 0.25);
  b.set("ttr", 0.125);
  const std::vector<FeatureVector> rows = {a, b};
  write_feature_csv(dir / "f.csv", rows, "prov");
  const auto back = read_feature_csv(dir / "f.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].values() == a.values());
  CHECK(back[1].values() == b.values());
  write_feature_json(dir / "f.json", rows, "\"prov\"");
  CHECK(nlohmann::json::parse(read_text_file(dir / "f.json")).is_object());
}

TEST_CASE("extract_features covers every category on a synthetic family") {
  const auto gen = synth::Generator(3);
  const auto fams = synth::Generator::families(3, 5);
  std::vector<corpus::Dataset> universe;
  for (const auto& f : fams) universe.push_back(gen.dataset(f, 3000, 2).renamed(f.family_id));
  const auto emb = learners::EmbeddingModel::train(universe[0], {.dim = 8});
  const auto fv = extract_features(universe[0], universe, &emb, PosTagger::default_tagger());
  std::set<std::string> categories;
  for (const auto& [name, v] : fv.values()) {
    categories.insert(find_feature(name)->category);
    CHECK(std::isfinite(v));
  }
  CHECK(categories.size() == 7);
}
