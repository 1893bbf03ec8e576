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
#include <sstream>

#include "childlm/common/io.hpp"
#include "childlm/common/rng.hpp"
#include "childlm/corpus/sampling.hpp"
#include "childlm/learners/embeddings.hpp"
#include "childlm/learners/ngram.hpp"
#include "childlm/learners/score_table.hpp"
#include "childlm/learners/scorer.hpp"
#include "childlm/synth/generator.hpp"
#include "doctest.h"
#include "testing.hpp"

using namespace childlm;
using namespace childlm::learners;
using childlm::testing::TempDir;

namespace {

using Seq = std::vector<std::string>;

corpus::Dataset from_lines(const std::vector<std::string>& lines) {
  std::vector<corpus::Conversation> convs;
  for (const auto& l : lines) convs.push_back(testing::conversation({{"MOT", l}}));
  return corpus::Dataset("lines", std::move(convs));
}

std::vector<Seq> sentences(const corpus::Dataset& d) {
  std::vector<Seq> out;
  for (const auto& c : d.conversations()) {
    for (const auto& u : c.utterances) {
      if (!u.tokens.empty()) out.push_back(u.tokens);
    }
  }
  return out;
}

// Bigram interpolated modified Kneser-Ney written straight from the
// textbook definition with string maps.
class BigramKnOracle {
 public:
  explicit BigramKnOracle(const std::vector<Seq>& data) {
    vocab_ = {"</s>", "<unk>"};
    for (const auto& s : data) {
      Seq w = {"<s>"};
      w.insert(w.end(), s.begin(), s.end());
      w.push_back("</s>");
      for (std::size_t i = 1; i < w.size(); ++i) {
        vocab_.insert(w[i]);
        bigram_[{w[i - 1], w[i]}] += 1;
      }
    }
    for (const auto& [k, c] : bigram_) {
      continuation_[k.second] += 1;
      context_total_[k.first] += c;
      context_n_[k.first][bucket(c)] += 1;
    }
    for (const auto& [w, c] : continuation_) {
      unigram_total_ += c;
      unigram_n_[bucket(c)] += 1;
    }
    std::array<double, 4> coc2{}, coc1{};
    for (const auto& [k, c] : bigram_) {
      if (c <= 4) coc2[static_cast<int>(c) - 1] += 1;
    }
    for (const auto& [w, c] : continuation_) {
      if (c <= 4) coc1[static_cast<int>(c) - 1] += 1;
    }
    d2_ = discounts(coc2);
    d1_ = discounts(coc1);
  }

  static std::array<double, 3> discounts(const std::array<double, 4>& n) {
    const double y = n[0] / (n[0] + 2 * n[1]);
    return {1 - 2 * y * n[1] / n[0], 2 - 3 * y * n[2] / n[1], 3 - 4 * y * n[3] / n[2]};
  }

  double unigram(const std::string& w) const {
    const double v = static_cast<double>(vocab_.size());
    const auto it = continuation_.find(w);
    const double c = it == continuation_.end() ? 0.0 : it->second;
    const double num = c > 0 ? std::max(c - d1_[bucket(c)], 0.0) : 0.0;
    const double gamma = d1_[0] * unigram_n_[0] + d1_[1] * unigram_n_[1] + d1_[2] * unigram_n_[2];
    return (num + gamma / v) / unigram_total_;
  }

  double prob(const std::string& h, const std::string& w) const {
    const auto t = context_total_.find(h);
    if (t == context_total_.end()) return unigram(w);
    const auto it = bigram_.find({h, w});
    const double c = it == bigram_.end() ? 0.0 : it->second;
    const double num = c > 0 ? std::max(c - d2_[bucket(c)], 0.0) : 0.0;
    const auto& n = context_n_.at(h);
    const double gamma = d2_[0] * n[0] + d2_[1] * n[1] + d2_[2] * n[2];
    return (num + gamma * unigram(w)) / t->second;
  }

  const std::array<double, 3>& d1() const { return d1_; }
  const std::array<double, 3>& d2() const { return d2_; }
  const std::set<std::string>& vocab() const { return vocab_; }

 private:
  static int bucket(double c) { return std::min(static_cast<int>(c), 3) - 1; }

  std::set<std::string> vocab_;
  std::map<std::pair<std::string, std::string>, double> bigram_;
  std::map<std::string, double> continuation_;
  std::map<std::string, double> context_total_;
  std::map<std::string, std::array<double, 3>> context_n_;
  double unigram_total_ = 0;
  std::array<double, 3> unigram_n_{};
  std::array<double, 3> d1_{}, d2_{};
};

corpus::Dataset synthetic(std::size_t tokens, std::uint64_t seed) {
  synth::Generator gen(7);
  return gen.dataset(synth::FamilyProfile{}, tokens, seed);
}

}  // namespace

TEST_CASE("bigram model matches the textbook oracle") {
  const auto d = synthetic(6000, 3);
  const auto model = NgramModel::train(d, {.order = 2});
  const BigramKnOracle oracle(sentences(d));
  for (int i = 0; i < 3; ++i) {
    CHECK(model.discounts(2)[i] == doctest::Approx(oracle.d2()[i]).epsilon(1e-12));
    CHECK(model.discounts(1)[i] == doctest::Approx(oracle.d1()[i]).epsilon(1e-12));
  }
  const auto held = synthetic(800, 99);
  std::size_t checked = 0;
  for (const auto& s : sentences(held)) {
    std::string prev = "<s>";
    for (const auto& w : s) {
      const std::string word = model.known(w) ? w : "<unk>";
      const Seq ctx = {prev};
      CHECK(model.prob(ctx, w) == doctest::Approx(oracle.prob(prev, word)).epsilon(1e-12));
      prev = word;
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("KN distributions sum to one") {
  const auto d = synthetic(20000, 5);
  for (int order = 1; order <= 4; ++order) {
    const auto model = NgramModel::train(d, {.order = order});
    const auto vocab = model.predictable_vocabulary();
    const auto sents = sentences(d);
    Rng rng(static_cast<std::uint64_t>(order));
    for (int rep = 0; rep < 20; ++rep) {
      Seq ctx;
      if (rep % 5 == 0) {
        ctx = {"<s>"};
      } else if (rep % 5 == 1) {
        ctx = {"zzunseen", "qqunseen"};
      } else {
        const auto& s = sents[rng.index(sents.size())];
        const std::size_t end = rng.index(s.size()) + 1;
        ctx.assign(s.begin(), s.begin() + static_cast<long>(end));
      }
      double total = 0;
      for (const auto& w : vocab) total += model.prob(ctx, w);
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("order one on a symmetric corpus") {
  const auto model = NgramModel::train(from_lines({"a b"}), {.order = 1});
  CHECK(model.prob({}, "a") == doctest::Approx(model.prob({}, "b")));
}

TEST_CASE("order must fit the longest utterance") {
  const auto d = from_lines({"a b"});
  CHECK_NOTHROW(NgramModel::train(d, {.order = 4}));
  CHECK_THROWS_AS(NgramModel::train(d, {.order = 5}), std::invalid_argument);
  CHECK_THROWS_AS(NgramModel::train(d, {.order = 0}), std::invalid_argument);
  CHECK_THROWS_AS(NgramModel::train(corpus::Dataset("e", {}), {}), std::invalid_argument);
}

TEST_CASE("sequence logprob is the negated sum of token NLLs") {
  const auto model = NgramModel::train(synthetic(3000, 2), {.order = 3});
  const Seq s = {"the", "dog", "runs", "."};
  const auto nlls = model.token_nlls(s);
  REQUIRE(nlls.size() == 4);
  double sum = 0;
  for (double v : nlls) sum += v;
  CHECK(model.sequence_logprob(s) == doctest::Approx(-sum));
  CHECK_THROWS_AS(model.token_nlls(Seq{}), std::invalid_argument);
  const std::vector<TokenSeq> item = {s, s};
  CHECK(model.score("x", item).logprob == doctest::Approx(-2 * sum));
}

TEST_CASE("degenerate corpus converges to certainty") {
  std::string line;
  for (int i = 0; i < 1000; ++i) line += "a ";
  const auto model = NgramModel::train(from_lines({line}), {.order = 3});
  const auto nlls = model.token_nlls(Seq{"a", "a", "a", "a"});
  CHECK(nlls.back() < 0.01);
  CHECK(model.prob(Seq{"a", "a"}, "a") > 0.99);
}

TEST_CASE("unseen words score as unk") {
  const auto d = synthetic(3000, 8);
  const auto model = NgramModel::train(d, {.order = 3});
  const Seq ctx = {"the", "dog"};
  CHECK(model.prob(ctx, "florbix") == model.prob(ctx, "<unk>"));
  CHECK(model.token_nlls(Seq{"the", "florbix"}) == model.token_nlls(Seq{"the", "quuxle"}));
  const auto thresholded = NgramModel::train(d, {.order = 2, .unk_threshold = 3});
  std::string rare;
  for (const auto& [w, c] : d.vocabulary()) {
    if (c == 1) rare = w;
  }
  REQUIRE_FALSE(rare.empty());
  CHECK_FALSE(thresholded.known(rare));
  CHECK(thresholded.prob(Seq{"the"}, rare) == thresholded.prob(Seq{"the"}, "florbix"));
}

TEST_CASE("KN beats a floored maximum-likelihood trigram on held-out text") {
  const auto d = synthetic(10000, 21);
  const auto held = synthetic(3000, 77);
  const auto kn = NgramModel::train(d, {.order = 3});
  std::map<Seq, double> tri, ctx;
  for (const auto& s : sentences(d)) {
    Seq w = {"<s>", "<s>"};
    w.insert(w.end(), s.begin(), s.end());
    w.push_back("</s>");
    for (std::size_t i = 2; i < w.size(); ++i) {
      tri[{w[i - 2], w[i - 1], w[i]}] += 1;
      ctx[{w[i - 2], w[i - 1]}] += 1;
    }
  }
  const double floor = 1e-6;
  double kn_nll = 0, mle_nll = 0;
  std::size_t n = 0;
  for (const auto& s : sentences(held)) {
    Seq w = {"<s>", "<s>"};
    w.insert(w.end(), s.begin(), s.end());
    for (std::size_t i = 2; i < w.size(); ++i) {
      const auto c = ctx.find({w[i - 2], w[i - 1]});
      const auto t = tri.find({w[i - 2], w[i - 1], w[i]});
      const double p = (c == ctx.end() || t == tri.end()) ? floor : t->second / c->second;
      mle_nll -= std::log(std::max(p, floor));
      ++n;
    }
    for (double v : kn.token_nlls(s)) kn_nll += v;
  }
  CHECK(kn_nll / n < mle_nll / n);
}

TEST_CASE("ngram save and load preserve probabilities") {
  TempDir dir("ngram");
  const auto model = NgramModel::train(synthetic(4000, 4), {.order = 3});
  model.save(dir / "m.json");
  const auto back = NgramModel::load(dir / "m.json");
  const Seq s = {"where", "is", "the", "ball", "?"};
  CHECK(back.token_nlls(s) == model.token_nlls(s));
  CHECK(back.order() == 3);
  write_file_atomic(dir / "bad.json", "{\"format\": \"other\"}");
  CHECK_THROWS_AS(NgramModel::load(dir / "bad.json"), UserError);
}

TEST_CASE("uniform scorer") {
  UniformScorer u(8);
  const std::vector<TokenSeq> item = {{"a", "b"}, {"c"}};
  CHECK(u.score("x", item).logprob == doctest::Approx(-3 * std::log(8.0)));
  CHECK_THROWS(UniformScorer(0));
}

TEST_CASE("co-occurrence counts and PPMI match direct computation") {
  const auto d = from_lines({"a b c", "a b", "c d"});
  const auto counts = cooccurrence_counts(d, 1);
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < counts.words.size(); ++i) idx[counts.words[i]] = static_cast<int>(i);
  auto at = [&](const PpmiMatrix& m, const std::string& a, const std::string& b) {
    return m.values.coeff(idx.at(a), idx.at(b));
  };
  CHECK(at(counts, "a", "b") == 2);
  CHECK(at(counts, "b", "a") == 2);
  CHECK(at(counts, "b", "c") == 1);
  CHECK(at(counts, "a", "c") == 0);
  CHECK(at(counts, "a", "d") == 0);

  const auto m = ppmi(d, 1, 0.75);
  // Brute force from the count matrix.
  const std::vector<std::string> w = counts.words;
  std::map<std::string, double> row;
  double total = 0;
  for (const auto& x : w) {
    for (const auto& y : w) {
      row[x] += at(counts, x, y);
      total += at(counts, x, y);
    }
  }
  double smooth = 0;
  for (const auto& y : w) smooth += std::pow(row[y], 0.75);
  for (const auto& x : w) {
    for (const auto& y : w) {
      const double c = at(counts, x, y);
      double want = 0;
      if (c > 0) {
        want = std::max(0.0, std::log((c / total) / ((row[x] / total) * (std::pow(row[y], 0.75) / smooth))));
      }
      CHECK(at(m, x, y) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  CHECK(at(m, "a", "d") == 0);
}

TEST_CASE("randomized SVD recovers a low-rank spectrum") {
  Rng rng(4);
  Eigen::MatrixXd u(40, 3), v(30, 3);
  for (int i = 0; i < u.size(); ++i) u.data()[i] = rng.normal();
  for (int i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
  const Eigen::MatrixXd dense = u * v.transpose();
  const Eigen::SparseMatrix<double> a = dense.sparseView();
  const auto r = randomized_svd(a, 3, 4, 10, 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> exact(dense);
  for (int i = 0; i < 3; ++i) CHECK(r.s(i) == doctest::Approx(exact.singularValues()(i)).epsilon(1e-8));
  const Eigen::MatrixXd rebuilt = r.u * r.s.asDiagonal() * r.v.transpose();
  CHECK((rebuilt - dense).norm() < 1e-8 * dense.norm());
  CHECK_THROWS_AS(randomized_svd(a, 31, 4, 10, 1), std::invalid_argument);
}

TEST_CASE("embeddings separate topic blocks") {
  Rng rng(12);
  std::vector<std::string> lines;
  for (int i = 0; i < 600; ++i) {
    const char block = i % 2 ? 'x' : 'y';
    std::string line;
    for (int j = 0; j < 6; ++j) line += std::string(1, block) + std::to_string(rng.index(10)) + " ";
    lines.push_back(line);
  }
  const auto model = EmbeddingModel::train(from_lines(lines), {.window = 3, .dim = 4, .seed = 3});
  double within = 0, cross = 0;
  int nw = 0, nc = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const std::string xi = "x" + std::to_string(i), xj = "x" + std::to_string(j);
      const std::string yj = "y" + std::to_string(j);
      if (i != j) {
        within += *model.cosine(xi, xj);
        ++nw;
      }
      cross += *model.cosine(xi, yj);
      ++nc;
    }
  }
  CHECK(within / nw > cross / nc);
  for (const auto& w : model.vocabulary()) CHECK(*model.cosine(w, w) == doctest::Approx(1.0));
  CHECK_FALSE(model.cosine("x1", "nope"));
}

TEST_CASE("embedding dim larger than the vocabulary is rejected") {
  try {
    EmbeddingModel::train(from_lines({"a b c"}), {.dim = 10});
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("smaller dim") != std::string::npos);
  }
}

TEST_CASE("embedding save and load") {
  TempDir dir("emb");
  const auto model = EmbeddingModel::train(synthetic(5000, 2), {.dim = 8});
  model.save(dir / "e.json");
  const auto back = EmbeddingModel::load(dir / "e.json");
  CHECK(back.vocabulary() == model.vocabulary());
  CHECK(*back.cosine("dog", "cat") == doctest::Approx(*model.cosine("dog", "cat")).epsilon(1e-12));
}

TEST_CASE("score table reads rows and rejects bad input") {
  std::istringstream in(
      "{\"item_id\":\"z1\",\"logprob\":-12.5}\n"
      "{\"item_id\":\"z2\",\"logprob\":-3,\"token_nlls\":[1,2]}\n"
      "\n"
      "{\"item_id\":\"z3\",\"logprob\":-1}\n");
  const auto t = ScoreTable::read(in, "s");
  CHECK(t.size() == 3);
  CHECK(t.logprob("z1") == -12.5);
  CHECK_FALSE(t.has_token_nlls());
  CHECK_FALSE(t.logprob("nope"));
  const std::vector<TokenSeq> two = {{"a", "b"}};
  CHECK(t.score("z2", two).token_nlls.size() == 2);
  const std::vector<TokenSeq> three = {{"a", "b", "c"}};
  CHECK_THROWS_AS(t.score("z2", three), UserError);
  CHECK_THROWS_AS(t.score("z9", two), UserError);

  std::istringstream dup("{\"item_id\":\"z1\",\"logprob\":-1}\n{\"item_id\":\"z1\",\"logprob\":-2}\n");
  CHECK_THROWS_AS(ScoreTable::read(dup, "s"), UserError);
  std::istringstream bad("{\"item_id\":\"z1\",\"logprob\":\"x\"}\n");
  CHECK_THROWS_AS(ScoreTable::read(bad, "s"), UserError);
  std::istringstream junk("not json\n");
  CHECK_THROWS_AS(ScoreTable::read(junk, "s"), UserError);
}

TEST_CASE("item ids") {
  CHECK(good_item_id("p1") == "p1:good");
  CHECK(bad_item_id("p1") == "p1:bad");
  CHECK(chunk_item_id(3, 0) == "conv3:chunk0");
}
