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

#include "childlm/features/pos.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/corpus/tokenize.hpp"

namespace childlm::features {
namespace {

constexpr std::array<std::string_view, kPosTagCount> kNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", "PUNCT", "X"};

// Most frequent tag of common words in speech to and by young children.
const std::pair<PosTag, std::string_view> kLexicon[] = {
    {PosTag::kDet,
     "the a an this that these those some any every each another no my your his her its our "
     "their what's which whose"},
    {PosTag::kPron,
     "i you he she it we they me him us them mine yours hers ours theirs myself yourself "
     "itself something nothing anything everything someone somebody everybody nobody who what "
     "i'm you're he's she's it's we're they're i'll you'll we'll it'll i've you've we've "
     "that's there's here's where's who's"},
    {PosTag::kAdp,
     "in on at to of for with from by about under over into onto out off up down through "
     "around behind near inside outside after before like"},
    {PosTag::kConj, "and or but so because if then when while"},
    {PosTag::kPrt, "not n't 's 'll 're 've 'm 'd"},
    {PosTag::kNum,
     "one two three four five six seven eight nine ten eleven twelve twenty hundred first "
     "second third"},
    {PosTag::kAdv,
     "here there now very too also just again yet still really all only maybe back away "
     "together soon today tomorrow yesterday later always never sometimes where why how "
     "how's please yes yeah no nope okay ok oh uh-oh wow hi hello bye bye-bye thanks "
     "ouch oops yay yum"},
    {PosTag::kVerb,
     "is are was were be been being am do does did done doing have has had having can could "
     "will would shall should may might must go goes going went gone come comes coming came "
     "get gets got getting make makes made put puts take takes took give gives gave see sees "
     "saw look looks looking want wants wanted need needs like likes know knows knew think "
     "say says said tell tells let let's eat eats ate drink drinks play plays sit sits sat "
     "stand run runs ran walk walks jump jumps fall falls fell push pushes pull pulls throw "
     "throws threw catch hold holds open opens close closes find finds found help helps "
     "read reads sing sings sleep sleeps wash washes feed feeds ride rides fill fills move "
     "moves bark barks swim swims hop hops roll rolls bounce bounces spin spins drive drives "
     "honk honks beep beeps hurt hurts wiggle wiggles itch itches break breaks squeak "
     "squeaks crumble crumbles squish squishes don't doesn't didn't can't won't isn't "
     "aren't wasn't love loves hug kiss wait stop stops try tries draw build clean cry "
     "laugh"},
    {PosTag::kAdj,
     "big little small good bad nice pretty happy sad hot cold wet dry dirty clean new old "
     "red blue green yellow orange purple pink black white brown soft hard fast slow loud "
     "quiet yummy furry round bouncy sore tiny funny silly sleepy hungry tired all-gone "
     "more other same different full empty heavy long short tall"},
    {PosTag::kNoun,
     "oven kitchen mommy mama mom daddy dada dad baby boy girl man lady kitty doggy doggie dog dogs cat "
     "cats bird birds cow cows duck ducks horse horses bunny bunnies frog frogs fish apple "
     "apples banana bananas cookie cookies cracker crackers egg eggs carrot carrots grape "
     "grapes berry berries juice milk water cheese bread ball balls block blocks doll dolls "
     "puzzle puzzles bear bears teddy book books balloon balloons crayon crayons toy toys "
     "car cars truck trucks bus buses train trains boat boats plane planes bike bikes "
     "tractor tractors nose noses hand hands foot feet ear ears eye eyes toe toes finger "
     "fingers tummy tummies mouth head hair cup cups spoon spoons bowl bowls chair chairs "
     "bed beds door doors shoe shoes hat hats sock socks shirt bath house home room table "
     "window outside park time day night job thing things name bottle diaper blanket "
     "sun moon tree flower dinner lunch breakfast snack"},
};

}  // namespace

std::string_view tag_name(PosTag tag) { return kNames[static_cast<std::size_t>(tag)]; }

std::optional<PosTag> parse_tag(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

PosTagger::PosTagger(std::map<std::string, PosTag, std::less<>> lexicon,
                     std::vector<SuffixRule> rules)
    : lexicon_(std::move(lexicon)), rules_(std::move(rules)) {}

std::map<std::string, PosTag, std::less<>> PosTagger::default_lexicon() {
  std::map<std::string, PosTag, std::less<>> lex;
  for (const auto& [tag, words] : kLexicon) {
    std::istringstream in{std::string(words)};
    std::string w;
    while (in >> w) lex.emplace(w, tag);  // first listing wins
  }
  return lex;
}

std::vector<SuffixRule> PosTagger::default_rules() {
  return {
      {"n't", PosTag::kVerb, 1}, {"'s", PosTag::kNoun, 1},  {"ing", PosTag::kVerb, 2},
      {"ed", PosTag::kVerb, 2},  {"ly", PosTag::kAdv, 3},   {"ness", PosTag::kNoun, 2},
      {"tion", PosTag::kNoun, 2}, {"ment", PosTag::kNoun, 2}, {"ful", PosTag::kAdj, 2},
      {"ous", PosTag::kAdj, 2},  {"est", PosTag::kAdj, 3},  {"ish", PosTag::kAdj, 2},
      {"ie", PosTag::kNoun, 2},  {"y", PosTag::kAdj, 3},
  };
}

const PosTagger& PosTagger::default_tagger() {
  static const PosTagger tagger(default_lexicon(), default_rules());
  return tagger;
}

std::map<std::string, PosTag, std::less<>> PosTagger::load_lexicon(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserError(fmt::format("cannot open POS lexicon '{}'", path.string()));
  std::map<std::string, PosTag, std::less<>> lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, '\t');
    const auto tag = fields.size() == 2 ? parse_tag(trim(fields[1])) : std::nullopt;
    if (!tag) {
      throw UserError(fmt::format("{}:{}: expected word<TAB>TAG with a universal tag",
                                  path.string(), line_no));
    }
    lex[trim(fields[0])] = *tag;
  }
  return lex;
}

PosTag PosTagger::tag_token(std::string_view token) const {
  if (const auto it = lexicon_.find(token); it != lexicon_.end()) return it->second;
  if (corpus::is_punctuation(token)) return PosTag::kPunct;
  if (!token.empty() && std::all_of(token.begin(), token.end(),
                                    [](char c) { return c >= '0' && c <= '9'; })) {
    return PosTag::kNum;
  }
  for (const auto& r : rules_) {
    if (token.size() >= r.suffix.size() + r.min_stem && token.ends_with(r.suffix)) return r.tag;
  }
  return PosTag::kX;
}

PosTaggedUtterance PosTagger::tag(std::span<const std::string> tokens) const {
  PosTaggedUtterance out;
  out.tokens.assign(tokens.begin(), tokens.end());
  std::size_t x = 0, words = 0;
  for (const auto& t : tokens) {
    const PosTag tag = tag_token(t);
    out.tags.push_back(tag);
    if (tag == PosTag::kX) ++x;
    if (tag != PosTag::kPunct) ++words;
  }
  out.parse_eligible = words > 0 && 2 * x <= tokens.size();
  return out;
}

}  // namespace childlm::features
