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

#include "walkguard/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "walkguard/errors.hpp"

namespace walkguard {

void RewardConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (ideal_length && *ideal_length < 1) fail("ideal_length must be >= 1");
  if (!std::isfinite(r_max)) fail("r_max must be finite");
  if (fluency_ngram_order < 1) fail("fluency_ngram_order must be >= 1");
  if (!(synonym_threshold > 0.0 && synonym_threshold <= 1.0)) {
    fail("synonym_threshold must be in (0, 1]");
  }
  const double w[] = {weights.simplicity, weights.fluency, weights.accuracy,
                      weights.keywords};
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail("reward weights must be >= 0");
  }
  if (std::all_of(std::begin(w), std::end(w), [](double x) { return x == 0.0; })) {
    fail("reward weights must not all be zero");
  }
}

double RewardVector::component(RewardComponent c) const {
  switch (c) {
    case RewardComponent::kSimplicity: return simplicity;
    case RewardComponent::kFluency: return fluency;
    case RewardComponent::kAccuracy: return accuracy;
    case RewardComponent::kKeywords: return keywords;
  }
  return 0.0;
}

double simplicity_reward(std::size_t output_length, const RewardConfig& cfg) {
  if (!cfg.ideal_length || *cfg.ideal_length < 1) {
    throw std::invalid_argument("simplicity_reward: ideal length must be >= 1");
  }
  const double l0 = static_cast<double>(*cfg.ideal_length);
  const double dev = (static_cast<double>(output_length) - l0) / l0;
  const double r = cfg.r_max - dev * dev;
  return cfg.simplicity_floor ? std::max(r, *cfg.simplicity_floor) : r;
}

double fluency_from_parts(double diversity, const Perplexity& ppl) {
  if (ppl.infinite || diversity == 0.0) return 0.0;
  return diversity / (diversity + ppl.value);
}

double fluency_reward(const TokenSequence& seq, const LmScorer& scorer,
                      const RewardConfig& cfg) {
  if (seq.empty()) throw std::invalid_argument("fluency_reward: empty sequence");
  const double dn = ngram_diversity(extract_ngrams(seq, cfg.fluency_ngram_order));
  return fluency_from_parts(dn, perplexity(score_tokens(scorer, seq)));
}

double accuracy_reward(const TokenSequence& gen, const TokenSequence& annt,
                       const EmbeddingTable& table) {
  if (gen.empty()) throw std::invalid_argument("accuracy_reward: empty generation");
  const double cos = cosine_similarity(embed_text(table, gen), embed_text(table, annt));
  return cos + mean_token_accuracy(gen, annt);
}

namespace {

std::map<std::string, std::size_t> keyword_hits(const TokenSequence& gen,
                                                const KeywordSet& keywords,
                                                const SynonymMap& synonyms) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& tok : gen.tokens) ++freq[tok];
  std::map<std::string, std::size_t> hits;
  for (const auto& k : keywords.keywords) {
    std::size_t total = 0;
    auto it = synonyms.entries.find(k);
    if (it == synonyms.entries.end()) {
      if (auto f = freq.find(k); f != freq.end()) total = f->second;
    } else {
      for (const auto& s : it->second) {
        if (auto f = freq.find(s); f != freq.end()) total += f->second;
      }
    }
    hits[k] = total;
  }
  return hits;
}

double keywords_from_hits(const KeywordSet& keywords,
                          const std::map<std::string, std::size_t>& hits,
                          bool clip) {
  if (keywords.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& k : keywords.keywords) {
    const std::size_t h = hits.at(k);
    sum += clip ? std::min<double>(1.0, static_cast<double>(h))
                : static_cast<double>(h);
  }
  return sum / static_cast<double>(keywords.size());
}

}  // namespace

double keywords_reward(const TokenSequence& gen, const KeywordSet& keywords,
                       const SynonymMap& synonyms, bool clip_keyword_count) {
  return keywords_from_hits(keywords, keyword_hits(gen, keywords, synonyms),
                            clip_keyword_count);
}

double composite_reward(const RewardVector& r, const RewardWeights& w) {
  return w.simplicity * r.simplicity + w.fluency * r.fluency +
         w.accuracy * r.accuracy + w.keywords * r.keywords;
}

RewardVector score_candidate(std::string_view gen_text, std::string_view annt_text,
                             const ScoringContext& ctx,
                             const CandidateOptions& opts) {
  const LmScorer* scorer = opts.scorer ? opts.scorer : ctx.scorer;
  if (!ctx.embeddings || !scorer) {
    throw std::invalid_argument("score_candidate: context lacks embeddings or scorer");
  }
  const TokenSequence gen = tokenize(gen_text);
  const TokenSequence annt = tokenize(annt_text);
  if (gen.empty()) {
    throw RewardError("fluency/accuracy",
                      "generated text has no tokens (both rewards need a "
                      "non-empty output)");
  }

  RewardConfig cfg = ctx.config;
  if (!cfg.ideal_length) {
    if (annt.empty()) {
      throw RewardError("simplicity",
                        "annotation has no tokens, cannot derive the ideal length");
    }
    cfg.ideal_length = static_cast<int>(annt.size());
  }

  RewardVector r;
  auto& d = r.diagnostics;
  d.output_length = gen.size();
  d.ideal_length = *cfg.ideal_length;
  r.simplicity = simplicity_reward(gen.size(), cfg);

  try {
    d.ngram_diversity = ngram_diversity(extract_ngrams(gen, cfg.fluency_ngram_order));
    const Perplexity ppl = perplexity(score_tokens(*scorer, gen));
    d.perplexity = ppl.value;
    d.perplexity_infinite = ppl.infinite;
    r.fluency = fluency_from_parts(d.ngram_diversity, ppl);
  } catch (const std::exception& e) {
    throw RewardError("fluency", e.what());
  }

  try {
    d.cosine = cosine_similarity(embed_text(*ctx.embeddings, gen),
                                 embed_text(*ctx.embeddings, annt));
    d.mean_token_accuracy = mean_token_accuracy(gen, annt);
    r.accuracy = d.cosine + d.mean_token_accuracy;
  } catch (const std::exception& e) {
    throw RewardError("accuracy", e.what());
  }

  KeywordSet extracted;
  const KeywordSet* keywords = opts.keywords;
  if (!keywords) {
    extracted = extract_keywords(annt, ctx.stopwords ? *ctx.stopwords
                                                     : default_stopwords());
    keywords = &extracted;
  }
  const SynonymMap synonyms =
      build_synonym_map(*ctx.embeddings, *keywords, cfg.synonym_threshold);
  d.keyword_hits = keyword_hits(gen, *keywords, synonyms);
  r.keywords = keywords_from_hits(*keywords, d.keyword_hits, cfg.clip_keyword_count);

  r.composite = composite_reward(r, cfg.weights);
  return r;
}

}  // namespace walkguard
