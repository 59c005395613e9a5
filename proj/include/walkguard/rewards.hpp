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

// The four candidate rewards and their weighted composite.
//
//   simplicity = r_max - ((L - L0) / L0)^2
//   fluency    = D_n / (D_n + PPL)
//   accuracy   = cos(embed(gen), embed(annt)) + mean_token_accuracy
//   keywords   = (1/n) sum_i sum_{s in S(k_i)} count_gen(s)

#ifndef WALKGUARD_REWARDS_HPP_
#define WALKGUARD_REWARDS_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "walkguard/embed.hpp"
#include "walkguard/lm.hpp"
#include "walkguard/text.hpp"

namespace walkguard {

enum class RewardComponent { kSimplicity = 0, kFluency, kAccuracy, kKeywords };

inline constexpr std::array<const char*, 4> kRewardComponentNames = {
    "simplicity", "fluency", "accuracy", "keywords"};

struct RewardWeights {
  double simplicity = 1.0;
  double fluency = 1.0;
  double accuracy = 1.0;
  double keywords = 1.0;

  bool operator==(const RewardWeights&) const = default;
};

struct RewardConfig {
  // Ideal length in tokens. Unset means "token count of the annotation".
  std::optional<int> ideal_length;
  double r_max = 1.0;
  // Lower bound applied to the simplicity reward; unset keeps it unbounded.
  std::optional<double> simplicity_floor;
  int fluency_ngram_order = 2;
  double synonym_threshold = 0.9;
  RewardWeights weights;
  // Cap each keyword's synonym hit count at 1.
  bool clip_keyword_count = false;

  // Throws std::invalid_argument describing the first violated range.
  void validate() const;

  bool operator==(const RewardConfig&) const = default;
};

struct RewardDiagnostics {
  std::size_t output_length = 0;
  int ideal_length = 0;
  double perplexity = 0.0;
  bool perplexity_infinite = false;
  double ngram_diversity = 0.0;
  double cosine = 0.0;
  double mean_token_accuracy = 0.0;
  // Synonym hits per keyword, before any clipping.
  std::map<std::string, std::size_t> keyword_hits;
};

struct RewardVector {
  double simplicity = 0.0;
  double fluency = 0.0;
  double accuracy = 0.0;
  double keywords = 0.0;
  double composite = 0.0;
  RewardDiagnostics diagnostics;

  double component(RewardComponent c) const;
};

// Raised by score_candidate; names the component that failed.
class RewardError : public std::runtime_error {
 public:
  RewardError(std::string component, const std::string& what)
      : std::runtime_error(component + ": " + what),
        component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

// Unclamped unless cfg.simplicity_floor is set. Requires cfg.ideal_length;
// score_candidate fills it from the annotation when unset.
double simplicity_reward(std::size_t output_length, const RewardConfig& cfg);

// D_n / (D_n + PPL) from its two inputs; 0 for infinite PPL or D_n = 0.
double fluency_from_parts(double diversity, const Perplexity& ppl);

double fluency_reward(const TokenSequence& seq, const LmScorer& scorer,
                      const RewardConfig& cfg);

double accuracy_reward(const TokenSequence& gen, const TokenSequence& annt,
                       const EmbeddingTable& table);

double keywords_reward(const TokenSequence& gen, const KeywordSet& keywords,
                       const SynonymMap& synonyms, bool clip_keyword_count = false);

double composite_reward(const RewardVector& r, const RewardWeights& w);

// Everything score_candidate needs besides the two texts. Holds references;
// the referenced objects must outlive the context.
struct ScoringContext {
  RewardConfig config;
  const EmbeddingTable* embeddings = nullptr;
  const LmScorer* scorer = nullptr;
  const StopwordSet* stopwords = nullptr;
};

struct CandidateOptions {
  // Overrides keyword extraction from the annotation.
  const KeywordSet* keywords = nullptr;
  // Overrides ctx.scorer for this candidate.
  const LmScorer* scorer = nullptr;
};

RewardVector score_candidate(std::string_view gen, std::string_view annt,
                             const ScoringContext& ctx,
                             const CandidateOptions& opts = {});

}  // namespace walkguard

#endif  // WALKGUARD_REWARDS_HPP_
