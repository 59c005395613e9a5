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

// Token embedding table, cosine similarity and synonym expansion.

#ifndef WALKGUARD_EMBED_HPP_
#define WALKGUARD_EMBED_HPP_

#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "walkguard/text.hpp"

namespace walkguard {

using Vector = std::vector<double>;

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }

  // Inserts or replaces. Returns false if the token already existed.
  // Throws std::invalid_argument on a dimension mismatch or a zero vector.
  bool insert(const std::string& token, Vector v);

  // nullptr when absent.
  const Vector* find(const std::string& token) const;
  bool contains(const std::string& token) const { return find(token) != nullptr; }

  // Tokens in first-insertion order.
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<Vector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadedEmbeddings {
  EmbeddingTable table;
  std::vector<std::string> warnings;
};

// word2vec text format: "<count> <dim>" header, then "<token> <v1> .. <vdim>".
// Duplicate tokens keep the last row and add a warning. Throws ParseError
// naming the offending line.
LoadedEmbeddings load_embeddings(std::istream& in);

// Throws std::invalid_argument on unequal dimensions or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Mean of the in-vocabulary token vectors. Throws OutOfVocabularyError if no
// token is in the table.
Vector embed_text(const EmbeddingTable& table, const TokenSequence& seq);

// {keyword} plus every table token whose cosine to the keyword is >= threshold.
// A keyword missing from the table maps to {keyword}.
std::set<std::string> synonym_set(const EmbeddingTable& table,
                                  const std::string& keyword, double threshold);

struct SynonymMap {
  double threshold = 0.9;
  std::map<std::string, std::set<std::string>> entries;

  const std::set<std::string>& at(const std::string& keyword) const {
    return entries.at(keyword);
  }
};

SynonymMap build_synonym_map(const EmbeddingTable& table,
                             const KeywordSet& keywords, double threshold);

// Each keyword maps to itself only.
SynonymMap singleton_synonyms(const KeywordSet& keywords);

}  // namespace walkguard

#endif  // WALKGUARD_EMBED_HPP_
