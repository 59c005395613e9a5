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

#include "walkguard/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

namespace walkguard {

double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

RougeScore rouge_n(const TokenSequence& gen, const TokenSequence& ref, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const NGramProfile g = extract_ngrams(gen, n);
  const NGramProfile r = extract_ngrams(ref, n);
  std::size_t overlap = 0;
  // Both maps are ordered; merge-join them.
  auto gi = g.counts.begin();
  auto ri = r.counts.begin();
  while (gi != g.counts.end() && ri != r.counts.end()) {
    if (gi->first < ri->first) {
      ++gi;
    } else if (ri->first < gi->first) {
      ++ri;
    } else {
      overlap += std::min(gi->second, ri->second);
      ++gi;
      ++ri;
    }
  }
  RougeScore s;
  if (g.total_count) s.precision = static_cast<double>(overlap) / static_cast<double>(g.total_count);
  if (r.total_count) s.recall = static_cast<double>(overlap) / static_cast<double>(r.total_count);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    prev.swap(cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenSequence& gen, const TokenSequence& ref) {
  RougeScore s;
  if (gen.empty() || ref.empty()) return s;
  const double l = static_cast<double>(lcs_length(gen.tokens, ref.tokens));
  s.precision = l / static_cast<double>(gen.size());
  s.recall = l / static_cast<double>(ref.size());
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

double keyword_density(const TokenSequence& gen, const KeywordSet& keywords,
                       const SynonymMap& synonyms) {
  if (gen.empty() || keywords.empty()) return 0.0;
  std::set<std::string, std::less<>> pool;
  for (const auto& k : keywords.keywords) {
    auto it = synonyms.entries.find(k);
    if (it == synonyms.entries.end()) {
      pool.insert(k);
    } else {
      pool.insert(it->second.begin(), it->second.end());
    }
  }
  const auto hits = std::count_if(gen.tokens.begin(), gen.tokens.end(),
                                  [&](const Token& t) { return pool.count(t) > 0; });
  return static_cast<double>(hits) / static_cast<double>(gen.size());
}

std::size_t ConfusionTable3::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t c : row) n += c;
  }
  return n;
}

void ConfusionTable3::add(DangerLevel truth, DangerLevel pred) {
  ++counts[static_cast<int>(truth)][static_cast<int>(pred)];
}

ConfusionTable3 confusion_table(std::span<const DangerLevel> pred,
                                std::span<const DangerLevel> truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("confusion_table: " + std::to_string(pred.size()) +
                                " predictions for " + std::to_string(truth.size()) +
                                " ground-truth frames");
  }
  ConfusionTable3 t;
  for (std::size_t i = 0; i < pred.size(); ++i) t.add(truth[i], pred[i]);
  return t;
}

double trf_score(const ConfusionTable3& table) {
  if (table.total() == 0) throw std::invalid_argument("trf_score: no frames");
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < 3; ++k) {
    std::size_t tp = table.counts[k][k], as_truth = 0, as_pred = 0;
    for (int j = 0; j < 3; ++j) {
      as_truth += table.counts[k][j];
      as_pred += table.counts[j][k];
    }
    if (as_truth == 0 && as_pred == 0) continue;
    ++present;
    const double precision = as_pred ? static_cast<double>(tp) / static_cast<double>(as_pred) : 0.0;
    const double recall = as_truth ? static_cast<double>(tp) / static_cast<double>(as_truth) : 0.0;
    sum += f1_score(precision, recall);
  }
  return sum / static_cast<double>(present);
}

double trf_score(std::span<const DangerLevel> pred, std::span<const DangerLevel> truth) {
  if (pred.empty() && truth.empty()) throw std::invalid_argument("trf_score: no frames");
  return trf_score(confusion_table(pred, truth));
}

}  // namespace walkguard
