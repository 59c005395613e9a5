// Copyright 2026 The Walkguard Authors.
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


#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "walkguard/embed.hpp"
#include "walkguard/lm.hpp"
#include "walkguard/random.hpp"
#include "walkguard/rewards.hpp"

using namespace walkguard;

namespace {

TokenSequence seq(std::vector<Token> t) { return TokenSequence{std::move(t), ""}; }

RewardConfig with_l0(int l0) {
  RewardConfig c;
  c.ideal_length = l0;
  return c;
}

KeywordSet keys(std::vector<Token> k) {
  KeywordSet s;
  s.keywords = std::move(k);
  return s;
}

}  // namespace

TEST_CASE("simplicity reward") {
  CHECK(simplicity_reward(10, with_l0(10)) == 1.0);
  CHECK(simplicity_reward(20, with_l0(10)) == 0.0);
  CHECK(simplicity_reward(25, with_l0(20)) == doctest::Approx(0.9375).epsilon(1e-12));
  CHECK(simplicity_reward(0, with_l0(20)) == 0.0);

  auto floored = with_l0(4);
  floored.simplicity_floor = -0.5;
  CHECK(simplicity_reward(16, floored) == -0.5);
  CHECK(simplicity_reward(4, floored) == 1.0);

  auto scaled = with_l0(4);
  scaled.r_max = 3.0;
  CHECK(simplicity_reward(4, scaled) == 3.0);

  CHECK_THROWS_AS(simplicity_reward(3, RewardConfig{}), std::invalid_argument);
}

TEST_CASE("simplicity is symmetric around the ideal length and peaks there") {
  for (int l0 : {1, 3, 7, 20}) {
    const auto cfg = with_l0(l0);
    for (int d = 1; d <= l0; ++d) {
      CHECK(simplicity_reward(l0 + d, cfg) == doctest::Approx(simplicity_reward(l0 - d, cfg)));
      CHECK(simplicity_reward(l0 + d, cfg) < simplicity_reward(l0 + d - 1, cfg));
    }
  }
}

TEST_CASE("fluency reward from diversity and perplexity") {
  CHECK(fluency_from_parts(1.0, {1.0, false}) == 0.5);
  CHECK(fluency_from_parts(2.0 / 3.0, {2.0, false}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fluency_from_parts(1.0, {std::numeric_limits<double>::infinity(), true}) == 0.0);
  CHECK(fluency_from_parts(0.0, {1.0, false}) == 0.0);
}

TEST_CASE("fluency reward through a scorer") {
  RewardConfig cfg;
  cfg.fluency_ngram_order = 1;
  // Two distinct unigrams of three, perplexity 2.
  const PrecomputedScorer half({-1, -1, -1});
  CHECK(fluency_reward(seq({"a", "b", "a"}), half, cfg) ==
        doctest::Approx((2.0 / 3.0) / (2.0 / 3.0 + 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(fluency_reward(seq({}), half, cfg), std::invalid_argument);
}

TEST_CASE("accuracy reward") {
  EmbeddingTable t(2);
  t.insert("a", {1, 0});
  t.insert("b", {0, 1});
  t.insert("p", {1, 0});
  t.insert("q", {1, 0});
  t.insert("r", {0.6, 1.2});

  CHECK(accuracy_reward(seq({"a", "b"}), seq({"a", "b"}), t) == 2.0);
  CHECK(accuracy_reward(seq({"a"}), seq({"b"}), t) == 0.0);
  // Pooled (1,0) against (0.8,0.6): cosine 0.8, one of two positions match.
  CHECK(accuracy_reward(seq({"p", "q"}), seq({"p", "r"}), t) ==
        doctest::Approx(1.3).epsilon(1e-12));
  CHECK_THROWS_AS(accuracy_reward(seq({}), seq({"a"}), t), std::invalid_argument);
}

TEST_CASE("keywords reward counts synonym occurrences") {
  SynonymMap syn;
  syn.entries["car"] = {"car", "vehicle"};
  CHECK(keywords_reward(seq({"car", "vehicle", "stop", "vehicle"}), keys({"car"}), syn) == 3.0);
  CHECK(keywords_reward(seq({"car", "vehicle", "vehicle"}), keys({"car"}), syn, true) == 1.0);
  CHECK(keywords_reward(seq({"car"}), keys({}), syn) == 0.0);

  const auto k2 = keys({"car", "dog"});
  CHECK(keywords_reward(seq({"a", "car"}), k2, singleton_synonyms(k2)) == 0.5);
}

TEST_CASE("keywords reward matches a brute-force scan") {
  Rng rng(5);
  const std::vector<std::string> vocab = {"car", "bus", "dog", "cat", "kerb", "step", "pole"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> gen(rng.index(12));
    for (auto& w : gen) w = vocab[rng.index(vocab.size())];
    std::vector<std::string> kw;
    for (const auto& w : vocab) {
      if (rng.uniform() < 0.3) kw.push_back(w);
    }
    SynonymMap syn;
    std::vector<std::set<std::string>> sets;
    for (const auto& k : kw) {
      std::set<std::string> s{k};
      for (const auto& w : vocab) {
        if (rng.uniform() < 0.2) s.insert(w);
      }
      syn.entries[k] = s;
      sets.push_back(s);
    }
    const bool clip = trial % 2 == 1;
    CHECK(keywords_reward(seq(gen), keys(kw), syn, clip) ==
          doctest::Approx(oracle::keyword_scan(gen, kw, sets, clip)).epsilon(1e-12));
  }
}

TEST_CASE("composite reward is the weighted sum") {
  RewardVector r;
  r.simplicity = 0.25;
  r.fluency = 0.5;
  r.accuracy = 1.5;
  r.keywords = 2.0;
  CHECK(composite_reward(r, {1, 0, 0, 0}) == 0.25);
  CHECK(composite_reward(r, {1, 1, 1, 1}) == 4.25);
  CHECK(composite_reward(r, {0.5, 2, 0, -1}) == doctest::Approx(0.125 + 1.0 - 2.0));
  for (int c = 0; c < 4; ++c) {
    RewardWeights w{0, 0, 0, 0};
    double* slots[] = {&w.simplicity, &w.fluency, &w.accuracy, &w.keywords};
    *slots[c] = 1.0;
    CHECK(composite_reward(r, w) == r.component(static_cast<RewardComponent>(c)));
  }
}

TEST_CASE("RewardConfig validation") {
  RewardConfig c;
  CHECK_NOTHROW(c.validate());
  c.ideal_length = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RewardConfig{};
  c.synonym_threshold = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RewardConfig{};
  c.fluency_ngram_order = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("score_candidate composes the four rewards") {
  EmbeddingTable t(2);
  t.insert("car", {1, 0});
  t.insert("ahead", {0, 1});
  t.insert("stop", {1, 1});
  const PrecomputedScorer certain({0, 0, 0});
  ScoringContext ctx;
  ctx.embeddings = &t;
  ctx.scorer = &certain;
  const StopwordSet stop;
  ctx.stopwords = &stop;
  ctx.config.synonym_threshold = 1.0;

  const auto r = score_candidate("Car ahead, stop.", "car ahead stop", ctx);
  CHECK(r.simplicity == 1.0);
  CHECK(r.accuracy == 2.0);
  CHECK(r.keywords == 1.0);
  // Bigram diversity 1, perplexity 1.
  CHECK(r.fluency == 0.5);
  CHECK(r.composite == doctest::Approx(4.5));
  CHECK(r.diagnostics.ideal_length == 3);
  CHECK(r.diagnostics.keyword_hits.at("car") == 1);

  ctx.config.weights = {1, 0, 0, 0};
  const PrecomputedScorer single({-3});
  const auto s = score_candidate("car", "car ahead stop", ctx, {nullptr, &single});
  CHECK(s.composite == s.simplicity);
}

TEST_CASE("score_candidate reports which reward failed") {
  EmbeddingTable t(2);
  t.insert("car", {1, 0});
  const PrecomputedScorer one({-1});
  ScoringContext ctx;
  ctx.embeddings = &t;
  ctx.scorer = &one;

  try {
    score_candidate("", "car", ctx);
    FAIL("expected a RewardError");
  } catch (const RewardError& e) {
    CHECK(e.component() == "fluency/accuracy");
  }
  try {
    score_candidate("zebra", "car", ctx);
    FAIL("expected a RewardError");
  } catch (const RewardError& e) {
    CHECK(e.component() == "accuracy");
  }
  try {
    score_candidate("car car", "car", ctx);
    FAIL("expected a RewardError");
  } catch (const RewardError& e) {
    CHECK(e.component() == "fluency");
  }
}
