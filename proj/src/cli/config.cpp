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

#include "walkguard/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "walkguard/errors.hpp"
#include "walkguard/format.hpp"

namespace walkguard::cli {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_real(std::string_view v) {
  double x;
  if (!parse_real(v, x)) throw std::invalid_argument("expected a real number");
  return x;
}

long long to_int(std::string_view v, long long lo, long long hi) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer");
  }
  if (x < lo || x > hi) {
    throw std::invalid_argument("must be in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  return x;
}

std::uint64_t to_u64(std::string_view v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected a non-negative integer");
  }
  return x;
}

bool to_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("expected true or false");
}

DangerLevel to_level(std::string_view v) {
  auto l = parse_danger_level(v);
  if (!l) throw std::invalid_argument("expected A, B or C");
  return *l;
}

std::string list_of(const std::vector<std::size_t>& xs) {
  if (xs.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

constexpr long long kIntMax = std::numeric_limits<int>::max();

struct Key {
  const char* name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> kKeys = {
      {"ideal_length",
       [](RunConfig& c, std::string_view v) {
         if (v == "annotation") {
           c.reward.ideal_length.reset();
         } else {
           c.reward.ideal_length = static_cast<int>(to_int(v, 1, kIntMax));
         }
       },
       [](const RunConfig& c) {
         return c.reward.ideal_length ? std::to_string(*c.reward.ideal_length)
                                      : std::string("annotation");
       }},
      {"r_max", [](RunConfig& c, std::string_view v) { c.reward.r_max = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.r_max); }},
      {"simplicity_floor",
       [](RunConfig& c, std::string_view v) {
         if (v == "none") {
           c.reward.simplicity_floor.reset();
         } else {
           c.reward.simplicity_floor = to_real(v);
         }
       },
       [](const RunConfig& c) {
         return c.reward.simplicity_floor ? format_real_exact(*c.reward.simplicity_floor)
                                          : std::string("none");
       }},
      {"fluency_ngram_order",
       [](RunConfig& c, std::string_view v) {
         c.reward.fluency_ngram_order = static_cast<int>(to_int(v, 1, kIntMax));
       },
       [](const RunConfig& c) { return std::to_string(c.reward.fluency_ngram_order); }},
      {"synonym_threshold",
       [](RunConfig& c, std::string_view v) { c.reward.synonym_threshold = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.synonym_threshold); }},
      {"weight_simplicity",
       [](RunConfig& c, std::string_view v) { c.reward.weights.simplicity = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.weights.simplicity); }},
      {"weight_fluency",
       [](RunConfig& c, std::string_view v) { c.reward.weights.fluency = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.weights.fluency); }},
      {"weight_accuracy",
       [](RunConfig& c, std::string_view v) { c.reward.weights.accuracy = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.weights.accuracy); }},
      {"weight_keywords",
       [](RunConfig& c, std::string_view v) { c.reward.weights.keywords = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.reward.weights.keywords); }},
      {"clip_keyword_count",
       [](RunConfig& c, std::string_view v) { c.reward.clip_keyword_count = to_bool(v); },
       [](const RunConfig& c) {
         return std::string(c.reward.clip_keyword_count ? "true" : "false");
       }},
      {"smoothing_alpha",
       [](RunConfig& c, std::string_view v) { c.smoothing_alpha = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.smoothing_alpha); }},
      {"lm_corpus",
       [](RunConfig& c, std::string_view v) { c.lm_corpus = std::string(v); },
       [](const RunConfig& c) { return c.lm_corpus; }},
      {"stopwords",
       [](RunConfig& c, std::string_view v) { c.stopwords = std::string(v); },
       [](const RunConfig& c) { return c.stopwords; }},
      {"advantage_epsilon",
       [](RunConfig& c, std::string_view v) { c.advantage_epsilon = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.advantage_epsilon); }},
      {"group_size",
       [](RunConfig& c, std::string_view v) {
         c.group_size = static_cast<int>(to_int(v, 0, kIntMax));
       },
       [](const RunConfig& c) { return std::to_string(c.group_size); }},
      {"trigger_window",
       [](RunConfig& c, std::string_view v) {
         c.trigger.window = static_cast<int>(to_int(v, 0, 1 << 20));
       },
       [](const RunConfig& c) { return std::to_string(c.trigger.window); }},
      {"trigger_rule",
       [](RunConfig& c, std::string_view v) {
         auto r = parse_trigger_rule(v);
         if (!r) throw std::invalid_argument("expected current_high, majority or threshold_score");
         c.trigger.rule = *r;
       },
       [](const RunConfig& c) { return to_string(c.trigger.rule); }},
      {"trigger_min_level",
       [](RunConfig& c, std::string_view v) { c.trigger.min_level = to_level(v); },
       [](const RunConfig& c) { return to_string(c.trigger.min_level); }},
      {"trigger_score_threshold",
       [](RunConfig& c, std::string_view v) { c.trigger.score_threshold = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.trigger.score_threshold); }},
      {"focal_gamma",
       [](RunConfig& c, std::string_view v) { c.training.loss.gamma = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.training.loss.gamma); }},
      {"focal_alpha",
       [](RunConfig& c, std::string_view v) {
         const auto parts = split_list(v);
         if (parts.size() != 3) throw std::invalid_argument("expected three comma-separated reals");
         for (int k = 0; k < 3; ++k) c.training.loss.alpha[k] = to_real(parts[k]);
       },
       [](const RunConfig& c) {
         const auto& a = c.training.loss.alpha;
         return format_real_exact(a[0]) + "," + format_real_exact(a[1]) + "," +
                format_real_exact(a[2]);
       }},
      {"loss_blend",
       [](RunConfig& c, std::string_view v) { c.training.loss.blend = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.training.loss.blend); }},
      {"hidden_dims",
       [](RunConfig& c, std::string_view v) {
         c.training.hidden_dims.clear();
         if (v == "none") return;
         for (const auto& p : split_list(v)) {
           c.training.hidden_dims.push_back(static_cast<std::size_t>(to_int(p, 1, 1 << 16)));
         }
       },
       [](const RunConfig& c) { return list_of(c.training.hidden_dims); }},
      {"learning_rate",
       [](RunConfig& c, std::string_view v) { c.training.learning_rate = to_real(v); },
       [](const RunConfig& c) { return format_real_exact(c.training.learning_rate); }},
      {"epochs",
       [](RunConfig& c, std::string_view v) {
         c.training.epochs = static_cast<int>(to_int(v, 1, kIntMax));
       },
       [](const RunConfig& c) { return std::to_string(c.training.epochs); }},
      {"batch_size",
       [](RunConfig& c, std::string_view v) {
         c.training.batch_size = static_cast<std::size_t>(to_int(v, 1, kIntMax));
       },
       [](const RunConfig& c) { return std::to_string(c.training.batch_size); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.training.seed = to_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.training.seed); }},
  };
  return kKeys;
}

}  // namespace

void RunConfig::validate() const {
  auto wrap = [](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(what) + ": " + e.what());
    }
  };
  wrap("reward", [&] { reward.validate(); });
  wrap("trigger", [&] { trigger.validate(); });
  wrap("training", [&] { training.validate(); });
  if (!(smoothing_alpha > 0.0) || !std::isfinite(smoothing_alpha)) {
    throw std::invalid_argument("smoothing_alpha must be > 0");
  }
  if (!(advantage_epsilon > 0.0) || !std::isfinite(advantage_epsilon)) {
    throw std::invalid_argument("advantage_epsilon must be > 0");
  }
  if (group_size < 0) throw std::invalid_argument("group_size must be >= 0");
  if (lm_corpus.empty()) throw std::invalid_argument("lm_corpus must not be empty");
  if (stopwords.empty()) throw std::invalid_argument("stopwords must not be empty");
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' starts a comment anywhere on the line; no value needs the character.
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& table = keys();
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const Key& k) { return key == k.name; });
    if (it == table.end()) throw ParseError(lineno, "unknown config key '" + key + "'");
    if (!seen.insert(key).second) throw ParseError(lineno, "duplicate config key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, key + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("invalid config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open config file '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

std::string print_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "# walkguard run configuration\n";
  for (const auto& k : keys()) out << k.name << " = " << k.get(cfg) << '\n';
  return out.str();
}

}  // namespace walkguard::cli
