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

// Flat "key = value" run configuration shared by every command.

#ifndef WALKGUARD_CLI_CONFIG_HPP_
#define WALKGUARD_CLI_CONFIG_HPP_

#include <istream>
#include <string>

#include "walkguard/ead.hpp"
#include "walkguard/grpo.hpp"
#include "walkguard/rewards.hpp"

namespace walkguard::cli {

struct RunConfig {
  RewardConfig reward;
  double smoothing_alpha = 1.0;
  // "references" fits the bigram model on the corpus references; anything
  // else is a path to a text file with one sentence per line.
  std::string lm_corpus = "references";
  // "builtin" or a path to a stopword file.
  std::string stopwords = "builtin";
  double advantage_epsilon = kDefaultAdvantageEpsilon;
  // 0 accepts any group size; otherwise every group must have exactly this many.
  int group_size = 0;
  TriggerPolicyConfig trigger;
  TrainingConfig training;

  bool operator==(const RunConfig&) const = default;

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

// Unknown keys, duplicate keys and out-of-range values are errors (ParseError
// with the line number). Keys not present keep their defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Every key with its current value, in a form parse_config accepts.
std::string print_config(const RunConfig& cfg);

}  // namespace walkguard::cli

#endif  // WALKGUARD_CLI_CONFIG_HPP_
