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

// Word-level text utilities shared by the reward and metric code.

#ifndef WALKGUARD_TEXT_HPP_
#define WALKGUARD_TEXT_HPP_

#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace walkguard {

using Token = std::string;
using NGram = std::vector<Token>;

struct TokenSequence {
  std::vector<Token> tokens;
  std::string source_text;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Sliding-window n-gram counts of one sequence.
struct NGramProfile {
  int order = 1;
  std::size_t distinct_count = 0;
  std::size_t total_count = 0;
  std::map<NGram, std::size_t> counts;
};

struct KeywordSet {
  enum class Origin { kExplicit, kExtracted };

  std::vector<Token> keywords;
  Origin origin = Origin::kExtracted;

  std::size_t size() const { return keywords.size(); }
  bool empty() const { return keywords.empty(); }
};

using StopwordSet = std::set<Token, std::less<>>;

// Lowercases (ASCII, Latin-1, Latin Extended-A, Greek, Cyrillic), splits on
// Unicode whitespace and strips leading/trailing punctuation from each piece.
// Pieces that become empty are dropped. Invalid UTF-8 bytes are kept as-is.
TokenSequence tokenize(std::string_view text);

// Space-joined tokens. tokenize(join_tokens(tokenize(x))) == tokenize(x).
std::string join_tokens(const TokenSequence& seq);

NGramProfile extract_ngrams(const TokenSequence& seq, int order);

// |V_n| / N_n, or 0 for a profile with no n-grams.
double ngram_diversity(const NGramProfile& profile);

// Positionwise exact-match rate over the generated tokens. Generated positions
// past the end of the annotation count as mismatches.
double mean_token_accuracy(const TokenSequence& gen, const TokenSequence& annt);

// Non-stopword tokens of the annotation, first occurrence order, no repeats.
KeywordSet extract_keywords(const TokenSequence& annt,
                            const StopwordSet& stopwords);

// Keywords given explicitly (e.g. from a corpus record). Each entry is run
// through the tokenizer; empty results are skipped and duplicates removed.
KeywordSet explicit_keywords(const std::vector<std::string>& raw);

// One token per line, '#' comment lines and blank lines ignored. Each line is
// normalized with the tokenizer so lists match tokenized text.
StopwordSet read_stopwords(std::istream& in);

// The list shipped in data/stopwords.txt, compiled in.
const StopwordSet& default_stopwords();

}  // namespace walkguard

#endif  // WALKGUARD_TEXT_HPP_
