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

// Token probability sources and perplexity.

#ifndef WALKGUARD_LM_HPP_
#define WALKGUARD_LM_HPP_

#include <istream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "walkguard/text.hpp"

namespace walkguard {

// One log2 probability per scored token. Entries are <= 0; -inf marks a
// token the model considers impossible.
struct TokenLogProbs {
  std::vector<double> log2_probs;
};

struct Perplexity {
  double value = 1.0;
  // Set when some token had probability 0; value is then +inf.
  bool infinite = false;
};

// Anything that can assign per-token probabilities to a sequence.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  // Called with a non-empty sequence; returns one entry per token.
  virtual TokenLogProbs log2_probs(const TokenSequence& seq) const = 0;
};

// Add-alpha smoothed bigram model. Outcomes are the training vocabulary plus
// an unknown symbol; contexts additionally include a start symbol.
//
//   P(w | prev) = (count(prev, w) + alpha) / (count(prev) + alpha * (V + 1))
//
// where count(prev) is the number of training bigrams starting with prev.
class BigramModel final : public LmScorer {
 public:
  static constexpr const char* kUnknown = "<unk>";
  static constexpr const char* kStart = "<s>";

  // Throws std::invalid_argument on an empty corpus or alpha <= 0.
  static BigramModel fit(std::span<const TokenSequence> corpus,
                         double smoothing_alpha = 1.0);

  TokenLogProbs log2_probs(const TokenSequence& seq) const override;

  // Conditional probability with unknown-token mapping applied to both
  // arguments. `prev` may be kStart.
  double probability(const std::string& prev, const std::string& word) const;

  std::size_t vocab_size() const { return vocab_.size(); }
  double smoothing_alpha() const { return alpha_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t unigram_count(const std::string& word) const;
  std::size_t bigram_count(const std::string& prev,
                           const std::string& word) const;

 private:
  BigramModel() = default;

  int index_of(const std::string& word) const;

  // Ids: 0..V-1 vocabulary, V unknown, V+1 start.
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::size_t> unigram_counts_;
  std::vector<std::size_t> context_counts_;
  std::map<std::pair<int, int>, std::size_t> bigram_counts_;
  double alpha_ = 1.0;
};

// Replays an externally computed log-prob list for one sequence.
class PrecomputedScorer final : public LmScorer {
 public:
  explicit PrecomputedScorer(std::vector<double> log2_probs);
  TokenLogProbs log2_probs(const TokenSequence& seq) const override;

 private:
  std::vector<double> values_;
};

// Validates the sequence and delegates to the scorer. Throws
// std::invalid_argument on an empty sequence or a length/sign violation in
// the scorer's output.
TokenLogProbs score_tokens(const LmScorer& scorer, const TokenSequence& seq);

// 2^(-mean(log2 p)). Throws std::invalid_argument on empty input.
Perplexity perplexity(const TokenLogProbs& lp);

// JSON Lines, one {"id": str, "log2_probs": [real]} per line. Throws
// ParseError naming the line on malformed input.
std::unordered_map<std::string, std::vector<double>> read_logprobs(
    std::istream& in);

}  // namespace walkguard

#endif  // WALKGUARD_LM_HPP_
