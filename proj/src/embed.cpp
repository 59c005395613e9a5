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

#include "walkguard/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "walkguard/errors.hpp"

namespace walkguard {
namespace {

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool all_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be >= 1");
}

bool EmbeddingTable::insert(const std::string& token, Vector v) {
  if (v.size() != dim_) {
    throw std::invalid_argument("embedding for '" + token + "' has " +
                                std::to_string(v.size()) + " components, expected " +
                                std::to_string(dim_));
  }
  if (all_zero(v)) {
    throw std::invalid_argument("embedding for '" + token + "' is all zero");
  }
  if (auto it = index_.find(token); it != index_.end()) {
    vectors_[it->second] = std::move(v);
    return false;
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(token);
  vectors_.push_back(std::move(v));
  return true;
}

const Vector* EmbeddingTable::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

LoadedEmbeddings load_embeddings(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing '<count> <dim>' header");
  ++lineno;
  std::istringstream header(line);
  long long count = -1, dim = -1;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim < 1) {
    throw ParseError(lineno, "malformed header, expected '<count> <dim>'");
  }
  LoadedEmbeddings out{EmbeddingTable(static_cast<std::size_t>(dim)), {}};
  long long rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    Vector v;
    std::string field;
    while (fields >> field) {
      double x = 0;
      if (!parse_double(field, x)) {
        throw ParseError(lineno, "not a decimal real: '" + field + "'");
      }
      v.push_back(x);
    }
    if (v.size() != static_cast<std::size_t>(dim)) {
      throw ParseError(lineno, "token '" + token + "' has " +
                                   std::to_string(v.size()) +
                                   " components, expected " + std::to_string(dim));
    }
    if (all_zero(v)) throw ParseError(lineno, "token '" + token + "' has a zero vector");
    if (!out.table.insert(token, std::move(v))) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": duplicate token '" +
                             token + "', keeping the last occurrence");
    }
    ++rows;
  }
  if (rows != count) {
    throw ParseError(lineno, "header declares " + std::to_string(count) +
                                 " rows but the file has " + std::to_string(rows));
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero-norm vector");
  }
  if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Vector embed_text(const EmbeddingTable& table, const TokenSequence& seq) {
  Vector sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : seq.tokens) {
    const Vector* v = table.find(tok);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++hits;
  }
  if (hits == 0) {
    throw OutOfVocabularyError("no token of \"" + join_tokens(seq) +
                               "\" is in the embedding table");
  }
  for (double& x : sum) x /= static_cast<double>(hits);
  return sum;
}

std::set<std::string> synonym_set(const EmbeddingTable& table,
                                  const std::string& keyword, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("synonym threshold must be in (0, 1]");
  }
  std::set<std::string> out{keyword};
  const Vector* kv = table.find(keyword);
  if (!kv) return out;
  for (const auto& tok : table.tokens()) {
    if (cosine_similarity(*kv, *table.find(tok)) >= threshold) out.insert(tok);
  }
  return out;
}

SynonymMap build_synonym_map(const EmbeddingTable& table,
                             const KeywordSet& keywords, double threshold) {
  SynonymMap map;
  map.threshold = threshold;
  for (const auto& k : keywords.keywords) {
    map.entries.emplace(k, synonym_set(table, k, threshold));
  }
  return map;
}

SynonymMap singleton_synonyms(const KeywordSet& keywords) {
  SynonymMap map;
  map.threshold = 1.0;
  for (const auto& k : keywords.keywords) map.entries.emplace(k, std::set{k});
  return map;
}

}  // namespace walkguard
