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

#include "walkguard/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "walkguard/errors.hpp"

namespace walkguard {

BigramModel BigramModel::fit(std::span<const TokenSequence> corpus,
                             double smoothing_alpha) {
  if (!(smoothing_alpha > 0.0) || !std::isfinite(smoothing_alpha)) {
    throw std::invalid_argument("fit_bigram_model: smoothing_alpha must be > 0");
  }
  BigramModel model;
  model.alpha_ = smoothing_alpha;
  bool any_tokens = false;
  for (const auto& seq : corpus) {
    for (const auto& tok : seq.tokens) {
      any_tokens = true;
      if (model.ids_.emplace(tok, static_cast<int>(model.vocab_.size())).second) {
        model.vocab_.push_back(tok);
      }
    }
  }
  if (!any_tokens) {
    throw std::invalid_argument("fit_bigram_model: corpus has no tokens");
  }
  const int vocab = static_cast<int>(model.vocab_.size());
  const int start = vocab + 1;
  model.unigram_counts_.assign(model.vocab_.size(), 0);
  model.context_counts_.assign(model.vocab_.size() + 2, 0);
  for (const auto& seq : corpus) {
    int prev = start;
    for (const auto& tok : seq.tokens) {
      const int id = model.ids_.at(tok);
      ++model.unigram_counts_[id];
      ++model.context_counts_[prev];
      ++model.bigram_counts_[{prev, id}];
      prev = id;
    }
  }
  return model;
}

int BigramModel::index_of(const std::string& word) const {
  if (word == kStart) return static_cast<int>(vocab_.size()) + 1;
  auto it = ids_.find(word);
  return it == ids_.end() ? static_cast<int>(vocab_.size()) : it->second;
}

double BigramModel::probability(const std::string& prev,
                                const std::string& word) const {
  const int p = index_of(prev);
  int w = index_of(word);
  if (w == static_cast<int>(vocab_.size()) + 1) w = static_cast<int>(vocab_.size());
  std::size_t pair = 0;
  if (auto it = bigram_counts_.find({p, w}); it != bigram_counts_.end()) {
    pair = it->second;
  }
  const double outcomes = static_cast<double>(vocab_.size() + 1);
  return (static_cast<double>(pair) + alpha_) /
         (static_cast<double>(context_counts_[p]) + alpha_ * outcomes);
}

TokenLogProbs BigramModel::log2_probs(const TokenSequence& seq) const {
  TokenLogProbs out;
  out.log2_probs.reserve(seq.size());
  std::string prev = kStart;
  for (const auto& tok : seq.tokens) {
    out.log2_probs.push_back(std::log2(probability(prev, tok)));
    prev = tok;
  }
  return out;
}

std::size_t BigramModel::unigram_count(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? 0 : unigram_counts_[it->second];
}

std::size_t BigramModel::bigram_count(const std::string& prev,
                                      const std::string& word) const {
  auto it = bigram_counts_.find({index_of(prev), index_of(word)});
  return it == bigram_counts_.end() ? 0 : it->second;
}

PrecomputedScorer::PrecomputedScorer(std::vector<double> log2_probs)
    : values_(std::move(log2_probs)) {}

TokenLogProbs PrecomputedScorer::log2_probs(const TokenSequence& seq) const {
  if (seq.size() != values_.size()) {
    throw std::invalid_argument(
        "precomputed log-probs cover " + std::to_string(values_.size()) +
        " tokens but the sequence has " + std::to_string(seq.size()));
  }
  return TokenLogProbs{values_};
}

TokenLogProbs score_tokens(const LmScorer& scorer, const TokenSequence& seq) {
  if (seq.empty()) {
    throw std::invalid_argument("score_tokens: empty sequence");
  }
  TokenLogProbs lp = scorer.log2_probs(seq);
  if (lp.log2_probs.size() != seq.size()) {
    throw std::invalid_argument("score_tokens: scorer returned " +
                                std::to_string(lp.log2_probs.size()) +
                                " entries for " + std::to_string(seq.size()) +
                                " tokens");
  }
  for (double v : lp.log2_probs) {
    if (std::isnan(v) || v > 0.0) {
      throw std::invalid_argument("score_tokens: log2 probability out of range");
    }
  }
  return lp;
}

Perplexity perplexity(const TokenLogProbs& lp) {
  if (lp.log2_probs.empty()) {
    throw std::invalid_argument("perplexity: empty log-prob list");
  }
  double sum = 0.0;
  for (double v : lp.log2_probs) {
    if (v == -std::numeric_limits<double>::infinity()) {
      return {std::numeric_limits<double>::infinity(), true};
    }
    sum += v;
  }
  const double mean = sum / static_cast<double>(lp.log2_probs.size());
  // Clamp tiny positive rounding so the result never dips below 1.
  return {std::max(1.0, std::exp2(-mean)), false};
}

std::unordered_map<std::string, std::vector<double>> read_logprobs(
    std::istream& in) {
  std::unordered_map<std::string, std::vector<double>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("log2_probs") || !rec["log2_probs"].is_array()) {
      throw ParseError(lineno, "expected {\"id\": string, \"log2_probs\": [real]}");
    }
    std::vector<double> values;
    for (const auto& v : rec["log2_probs"]) {
      if (v.is_number()) {
        values.push_back(v.get<double>());
      } else if (v.is_null() || (v.is_string() && v.get<std::string>() == "-inf")) {
        values.push_back(-std::numeric_limits<double>::infinity());
      } else {
        throw ParseError(lineno, "log2_probs entries must be numbers");
      }
    }
    out[rec["id"].get<std::string>()] = std::move(values);
  }
  return out;
}

}  // namespace walkguard
