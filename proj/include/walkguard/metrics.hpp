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

// Evaluation metrics: ROUGE-N, ROUGE-L, keyword density and the temporal
// redundancy F1 over danger levels.

#ifndef WALKGUARD_METRICS_HPP_
#define WALKGUARD_METRICS_HPP_

#include <array>
#include <cstddef>
#include <span>

#include "walkguard/ead.hpp"
#include "walkguard/embed.hpp"
#include "walkguard/text.hpp"

namespace walkguard {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean, 0 when both are 0.
double f1_score(double precision, double recall);

// Clipped n-gram overlap. Throws std::invalid_argument for n < 1.
RougeScore rouge_n(const TokenSequence& gen, const TokenSequence& ref, int n);

// LCS-based, beta = 1.
RougeScore rouge_l(const TokenSequence& gen, const TokenSequence& ref);

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b);

// Fraction of generated tokens that fall in the union of the keywords'
// synonym sets. Counts token occurrences. 0 for empty output or no keywords.
double keyword_density(const TokenSequence& gen, const KeywordSet& keywords,
                       const SynonymMap& synonyms);

// counts[true][predicted].
struct ConfusionTable3 {
  std::array<std::array<std::size_t, 3>, 3> counts{};

  std::size_t total() const;
  void add(DangerLevel truth, DangerLevel pred);
};

// Throws std::invalid_argument on unequal lengths.
ConfusionTable3 confusion_table(std::span<const DangerLevel> pred,
                                std::span<const DangerLevel> truth);

// Macro F1 over the classes present in pred or truth. Throws
// std::invalid_argument on empty or unequal inputs.
double trf_score(std::span<const DangerLevel> pred, std::span<const DangerLevel> truth);
double trf_score(const ConfusionTable3& table);

}  // namespace walkguard

#endif  // WALKGUARD_METRICS_HPP_
