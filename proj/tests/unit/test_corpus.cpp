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

#include <fstream>
#include <set>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/log.hpp"
#include "childlm/corpus/dataset.hpp"
#include "childlm/corpus/manifest.hpp"
#include "childlm/corpus/sampling.hpp"
#include "childlm/corpus/tokenize.hpp"
#include "childlm/corpus/transcript.hpp"
#include "childlm/synth/generator.hpp"
#include "doctest.h"
#include "testing.hpp"

using namespace childlm;
using namespace childlm::corpus;
using childlm::testing::TempDir;

namespace {

using Tokens = std::vector<std::string>;

TranscriptReadResult read_text(const std::string& text,
                               TranscriptLayout layout = TranscriptLayout::kSingleLine) {
  std::istringstream in(text);
  TranscriptOptions opts;
  opts.layout = layout;
  opts.family_id = "f";
  return read_transcripts(in, opts);
}

std::vector<std::size_t> sizes(const Dataset& d) {
  std::vector<std::size_t> out;
  for (const auto& c : d.conversations()) out.push_back(c.token_count());
  return out;
}

Dataset equal_conversations(std::size_t n, std::size_t tokens, const std::string& family) {
  std::vector<Conversation> convs;
  for (std::size_t i = 0; i < n; ++i) {
    convs.push_back(testing::sized_conversation(tokens, family, family + std::to_string(i)));
  }
  return Dataset(family, std::move(convs));
}

}  // namespace

TEST_CASE("tokenizer splits marks and keeps contractions") {
  CHECK(tokenize("Put it in the oven.") == Tokens{"put", "it", "in", "the", "oven", "."});
  CHECK(tokenize("Don't, let's go!") == Tokens{"don't", ",", "let's", "go", "!"});
  CHECK(tokenize("'quoted' word") == Tokens{"'", "quoted", "'", "word"});
  CHECK(tokenize("  ") == Tokens{});
  CHECK(tokenize("A?!") == Tokens{"a", "?", "!"});
  CHECK(is_punctuation("?"));
  CHECK_FALSE(is_punctuation("a."));
  CHECK_FALSE(is_punctuation(""));
}

TEST_CASE("single-line record parses into utterances") {
  const auto r = read_text(
      "**MOT**: Put it in the oven. \\n\\n **CHI**: Whoopsie. <|endoftext|>\n"
      "**FAT**: Hi there! \\n\\n **GMA**: hello <|endoftext|>\n");
  REQUIRE(r.errors.empty());
  REQUIRE(r.conversations.size() == 2);
  const auto& c = r.conversations[0];
  REQUIRE(c.utterances.size() == 2);
  CHECK(c.utterances[0].role == SpeakerRole::kMother);
  CHECK(c.utterances[0].text == "Put it in the oven.");
  CHECK(c.utterances[1].role == SpeakerRole::kTargetChild);
  CHECK(c.utterances[1].tokens == Tokens{"whoopsie", "."});
  CHECK(c.family_id == "f");
  CHECK(r.conversations[1].utterances[1].role == SpeakerRole::kOther);
  CHECK(r.conversations[1].utterances[1].label == "GMA");
}

TEST_CASE("speaker aliases map extra labels") {
  std::istringstream in("**GMA**: hi <|endoftext|>\n");
  TranscriptOptions opts;
  opts.aliases.set("GMA", SpeakerRole::kMother);
  const auto r = read_transcripts(in, opts);
  REQUIRE(r.conversations.size() == 1);
  CHECK(r.conversations[0].utterances[0].role == SpeakerRole::kMother);
}

TEST_CASE("malformed records are reported with their lines") {
  const auto r = read_text(
      "**MOT**: fine <|endoftext|>\n"
      "\n"
      "no header here <|endoftext|>\n"
      "**MOT**: ok \\n\\n missing <|endoftext|>\n"
      "**MOT: unclosed <|endoftext|>\n"
      "**MOT**: trailing <|endoftext|> junk\n");
  CHECK(r.conversations.size() == 1);
  REQUIRE(r.errors.size() == 4);
  CHECK(r.errors[0].line == 3);
  CHECK(r.errors[0].record_index == 1);
  CHECK(r.errors[1].line == 4);
  CHECK(r.errors[1].message.find("utterance 2") != std::string::npos);
  CHECK(r.errors[2].line == 5);
  CHECK(r.errors[3].line == 6);
}

TEST_CASE("strict parser throws with every issue") {
  TempDir dir("tx");
  write_file_atomic(dir / "bad.txt", "oops <|endoftext|>\n**MOT**: ok <|endoftext|>\nbad <|endoftext|>\n");
  try {
    parse_transcripts(dir / "bad.txt", {});
    FAIL("expected TranscriptError");
  } catch (const TranscriptError& e) {
    CHECK(e.issues().size() == 2);
    const std::string what = e.what();
    CHECK(what.find("line 1") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
  }
}

TEST_CASE("empty file gives an empty dataset and a warning") {
  TempDir dir("tx");
  write_file_atomic(dir / "empty.txt", "");
  ScopedLogCapture cap;
  const Dataset d = parse_transcripts(dir / "empty.txt", {});
  CHECK(d.empty());
  CHECK(cap.contains("no conversations"));
  CHECK_THROWS_AS(parse_transcripts(dir / "missing.txt", {}), UserError);
}

TEST_CASE("missing sentinel is a warning only") {
  const auto r = read_text("**MOT**: hello\n");
  CHECK(r.errors.empty());
  CHECK(r.conversations.size() == 1);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("sentinel") != std::string::npos);
}

TEST_CASE("blank-line layout") {
  const auto r = read_text(
      "**MOT**: Look at\nthe dog.\n\n**CHI**: dog <|endoftext|>\n\n"
      "**FAT**: bye <|endoftext|>\n",
      TranscriptLayout::kBlankLine);
  REQUIRE(r.errors.empty());
  REQUIRE(r.conversations.size() == 2);
  CHECK(r.conversations[0].utterances.size() == 2);
  CHECK(r.conversations[0].utterances[0].text == "Look at the dog.");
  CHECK(r.conversations[1].utterances[0].role == SpeakerRole::kFather);
}

TEST_CASE("serialize then parse is a fixed point in both layouts") {
  synth::Generator gen(3);
  synth::FamilyProfile fam;
  const auto convs = gen.conversations(fam, 3000, 11);
  for (auto layout : {TranscriptLayout::kSingleLine, TranscriptLayout::kBlankLine}) {
    std::ostringstream out;
    write_transcripts(out, convs, layout);
    const auto r1 = read_text(out.str(), layout);
    REQUIRE(r1.errors.empty());
    std::ostringstream out2;
    write_transcripts(out2, r1.conversations, layout);
    CHECK(out.str() == out2.str());
    REQUIRE(r1.conversations.size() == convs.size());
    for (std::size_t i = 0; i < convs.size(); ++i) {
      REQUIRE(r1.conversations[i].utterances.size() == convs[i].utterances.size());
      for (std::size_t j = 0; j < convs[i].utterances.size(); ++j) {
        CHECK(r1.conversations[i].utterances[j].tokens == convs[i].utterances[j].tokens);
        CHECK(r1.conversations[i].utterances[j].role == convs[i].utterances[j].role);
      }
    }
  }
}

TEST_CASE("dataset counts and ttr") {
  const Dataset d("d", {testing::conversation({{"MOT", "the cat the dog"}})});
  CHECK(d.token_count() == 4);
  CHECK(d.vocabulary().at("the") == 2);
  CHECK(ttr(d) == 0.75);
  const Dataset parts[] = {d, d};
  const Dataset doubled = concatenate("dd", parts);
  CHECK(ttr(doubled) <= ttr(d));
  CHECK(ttr(doubled) == 0.375);
  CHECK_THROWS_AS(ttr(Dataset("e", {})), std::invalid_argument);
}

TEST_CASE("ttr never rises when a dataset is concatenated with itself") {
  synth::Generator gen(5);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const Dataset d = gen.dataset(synth::FamilyProfile{}, 500 * s, s);
    const Dataset parts[] = {d, d};
    CHECK(ttr(concatenate("x", parts)) <= ttr(d));
  }
}

TEST_CASE("split of 100 equal conversations puts 85 in train") {
  const Dataset d = equal_conversations(100, 10, "a");
  const auto s = split_train_val(d, 0.85, 1);
  CHECK(s.train.conversations().size() == 85);
  CHECK(s.val.conversations().size() == 15);
}

TEST_CASE("split adds the largest conversations first") {
  const Dataset d("d", {testing::sized_conversation(100, "a"), testing::sized_conversation(900, "a")});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = split_train_val(d, 0.85, seed);
    CHECK(sizes(s.train) == std::vector<std::size_t>{900});
    CHECK(sizes(s.val) == std::vector<std::size_t>{100});
  }
}

TEST_CASE("validation side is never empty") {
  const Dataset d("d", {testing::sized_conversation(10, "a"), testing::sized_conversation(1, "a")});
  const auto s = split_train_val(d, 0.99, 3);
  CHECK(s.train.conversations().size() == 1);
  CHECK(s.val.conversations().size() == 1);
}

TEST_CASE("split is a deterministic partition") {
  synth::Generator gen(2);
  const Dataset d = gen.dataset(synth::FamilyProfile{}, 8000, 4);
  const auto a = split_train_val(d, 0.85, 7);
  const auto b = split_train_val(d, 0.85, 7);
  CHECK(sizes(a.train) == sizes(b.train));
  CHECK(a.train.token_count() + a.val.token_count() == d.token_count());
  CHECK(a.train.conversations().size() + a.val.conversations().size() ==
        d.conversations().size());
  const double share = static_cast<double>(a.train.token_count()) / d.token_count();
  CHECK(share >= 0.85);
  CHECK_THROWS_AS(split_train_val(d, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_val(d, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_val(Dataset("one", {testing::sized_conversation(5, "a")}), 0.5, 1),
                  std::invalid_argument);
}

TEST_CASE("mixture quotas are proportional") {
  const Dataset sources[] = {equal_conversations(10, 10, "a"), equal_conversations(30, 10, "b")};
  const auto q = mixture_quotas(sources, 200);
  CHECK(q.at("a") == 50.0);
  CHECK(q.at("b") == 150.0);
  const Dataset m = build_mixture(sources, 200, 9, "mix");
  CHECK(m.token_count() == 200);
  std::size_t a_tokens = 0;
  for (const auto& c : m.conversations()) {
    if (c.family_id == "a") a_tokens += c.token_count();
  }
  CHECK(a_tokens == 50);
  CHECK(m.name() == "mix");
  CHECK_THROWS_AS(build_mixture(sources, 401, 1), std::invalid_argument);
}

TEST_CASE("mixture draws depend on the seed") {
  const Dataset sources[] = {equal_conversations(40, 10, "a"), equal_conversations(40, 10, "b")};
  const Dataset m1 = build_mixture(sources, 200, 1);
  const Dataset m2 = build_mixture(sources, 200, 1);
  const Dataset m3 = build_mixture(sources, 200, 2);
  CHECK(m1.vocabulary() == m2.vocabulary());
  CHECK(m1.vocabulary() != m3.vocabulary());
}

TEST_CASE("manifest round trip and validation") {
  TempDir dir("manifest");
  write_manifest(dir / "m.json", {{dir / "a.txt", "a", 20}, {dir / "b.txt", "b", std::nullopt}});
  const auto e = read_manifest(dir / "m.json");
  REQUIRE(e.size() == 2);
  CHECK(e[0].family_id == "a");
  CHECK(e[0].child_age_months == 20);
  CHECK_FALSE(e[1].child_age_months);
  CHECK(e[1].path.filename() == "b.txt");
  write_file_atomic(dir / "rel.json", R"([{"path": "x.txt", "family_id": "x"}])");
  CHECK(read_manifest(dir / "rel.json")[0].path == dir / "x.txt");
  write_file_atomic(dir / "bad.json", R"([{"path": 3}])");
  CHECK_THROWS_AS(read_manifest(dir / "bad.json"), UserError);
  write_file_atomic(dir / "age.json", R"([{"path": "x", "family_id": "x", "child_age_months": -1}])");
  CHECK_THROWS_AS(read_manifest(dir / "age.json"), UserError);
  write_file_atomic(dir / "junk.json", "{");
  CHECK_THROWS_AS(read_manifest(dir / "junk.json"), UserError);
}

TEST_CASE("role codes") {
  for (auto r : {SpeakerRole::kTargetChild, SpeakerRole::kMother, SpeakerRole::kFather,
                 SpeakerRole::kOtherChild, SpeakerRole::kOther}) {
    CHECK(parse_role_code(role_code(r)) == r);
  }
  CHECK_FALSE(parse_role_code("XYZ"));
  CHECK(parse_layout("blank_line") == TranscriptLayout::kBlankLine);
}

TEST_CASE("transcript examples") {
  CHECK(tokenize("Put it in the oven for baby and me.") ==
        Tokens{"put", "it", "in", "the", "oven", "for", "baby", "and", "me", "."});
  CHECK(tokenize("Hey, Rosa, look at me.") ==
        Tokens{"hey", ",", "rosa", ",", "look", "at", "me", "."});
  CHECK(tokenize("Let's try!") == Tokens{"let's", "try", "!"});
  CHECK(tokenize("") == Tokens{});
  const auto r = read_text("**MOT**: a <|endoftext|>\njust words <|endoftext|>\n");
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].message.find("record 1") != std::string::npos);
}

TEST_CASE("ttr of small token lists") {
  CHECK(ttr(Dataset("d", {testing::conversation({{"MOT", "a b a"}})})) ==
        doctest::Approx(2.0 / 3.0));
  CHECK(ttr(Dataset("d", {testing::conversation({{"MOT", "a b c d"}})})) == 1.0);
}

TEST_CASE("mixture with budget equal to a lone family takes all of it") {
  const Dataset sources[] = {equal_conversations(7, 13, "a")};
  const Dataset m = build_mixture(sources, 91, 4);
  CHECK(m.conversations().size() == 7);
  CHECK(m.token_count() == 91);
}

TEST_CASE("empty mixture sources are skipped with a warning") {
  ScopedLogCapture cap;
  const Dataset sources[] = {equal_conversations(4, 10, "a"), Dataset("empty", {})};
  const Dataset m = build_mixture(sources, 40, 1);
  CHECK(m.token_count() == 40);
  CHECK(cap.contains("no conversations"));
}
