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

#include "walkguard/text.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace walkguard {
namespace {

// A decoded code point plus the byte span it came from, so malformed bytes
// can be copied through unchanged.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
  bool valid;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back({0xFFFD, i, 1, false});
      ++i;
      continue;
    }
    out.push_back({cp, i, len, true});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    const bool even_upper = (c <= 0x137 && c != 0x131) ||
                            (c >= 0x14A && c <= 0x177);
    const bool odd_upper = (c >= 0x139 && c <= 0x148) ||
                           (c >= 0x179 && c <= 0x17E);
    if (even_upper && c % 2 == 0) return c + 1;
    if (odd_upper && c % 2 == 1) return c + 1;
    return c;
  }
  // Greek
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 0x25;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 0x3F;
  // Cyrillic
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB:
    case 0xBF:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0x3014 && c <= 0x301F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20);
}

void flush_piece(const std::vector<CodePoint>& cps, std::size_t begin,
                 std::size_t end, std::string_view src,
                 std::vector<Token>& out) {
  while (begin < end && cps[begin].valid && is_punct(cps[begin].value)) ++begin;
  while (end > begin && cps[end - 1].valid && is_punct(cps[end - 1].value)) --end;
  if (begin == end) return;
  std::string token;
  for (std::size_t k = begin; k < end; ++k) {
    if (cps[k].valid) {
      append_utf8(token, to_lower(cps[k].value));
    } else {
      token.append(src.substr(cps[k].offset, cps[k].length));
    }
  }
  out.push_back(std::move(token));
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  seq.source_text = std::string(text);
  const auto cps = decode_utf8(text);
  std::size_t start = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].valid && is_space(cps[i].value)) {
      flush_piece(cps, start, i, text, seq.tokens);
      start = i + 1;
    }
  }
  flush_piece(cps, start, cps.size(), text, seq.tokens);
  return seq;
}

std::string join_tokens(const TokenSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += seq.tokens[i];
  }
  return out;
}

NGramProfile extract_ngrams(const TokenSequence& seq, int order) {
  if (order < 1) {
    throw std::invalid_argument("extract_ngrams: order must be >= 1, got " +
                                std::to_string(order));
  }
  NGramProfile profile;
  profile.order = order;
  const auto n = static_cast<std::size_t>(order);
  if (seq.tokens.size() < n) return profile;
  for (std::size_t i = 0; i + n <= seq.tokens.size(); ++i) {
    NGram gram(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
               seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++profile.counts[std::move(gram)];
    ++profile.total_count;
  }
  profile.distinct_count = profile.counts.size();
  return profile;
}

double ngram_diversity(const NGramProfile& profile) {
  if (profile.total_count == 0) return 0.0;
  return static_cast<double>(profile.distinct_count) /
         static_cast<double>(profile.total_count);
}

double mean_token_accuracy(const TokenSequence& gen,
                           const TokenSequence& annt) {
  if (gen.empty()) {
    throw std::invalid_argument("mean_token_accuracy: generated sequence is empty");
  }
  std::size_t hits = 0;
  const std::size_t overlap = std::min(gen.size(), annt.size());
  for (std::size_t i = 0; i < overlap; ++i) {
    if (gen.tokens[i] == annt.tokens[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gen.size());
}

KeywordSet extract_keywords(const TokenSequence& annt,
                            const StopwordSet& stopwords) {
  KeywordSet out;
  out.origin = KeywordSet::Origin::kExtracted;
  std::unordered_set<std::string_view> seen;
  for (const auto& tok : annt.tokens) {
    if (stopwords.count(tok)) continue;
    if (seen.insert(tok).second) out.keywords.push_back(tok);
  }
  return out;
}

KeywordSet explicit_keywords(const std::vector<std::string>& raw) {
  KeywordSet out;
  out.origin = KeywordSet::Origin::kExplicit;
  std::set<std::string, std::less<>> seen;
  for (const auto& entry : raw) {
    for (auto& tok : tokenize(entry).tokens) {
      if (seen.insert(tok).second) out.keywords.push_back(std::move(tok));
    }
  }
  return out;
}

StopwordSet read_stopwords(std::istream& in) {
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (auto& tok : tokenize(line).tokens) out.insert(std::move(tok));
  }
  return out;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet kSet = [] {
    // Keep in sync with data/stopwords.txt.
    std::istringstream in(
#include "stopwords.inc"
    );
    return read_stopwords(in);
  }();
  return kSet;
}

}  // namespace walkguard
