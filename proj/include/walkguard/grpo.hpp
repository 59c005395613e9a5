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

// Group-relative advantages and reward telemetry.

#ifndef WALKGUARD_GRPO_HPP_
#define WALKGUARD_GRPO_HPP_

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "walkguard/rewards.hpp"

namespace walkguard {

inline constexpr double kDefaultAdvantageEpsilon = 1e-8;

struct Candidate {
  std::string text;
  RewardVector reward;
};

struct CandidateGroup {
  std::string prompt_id;
  std::vector<Candidate> candidates;
};

struct AdvantageVector {
  std::vector<double> advantages;
  double group_mean = 0.0;
  // Population standard deviation of the rewards.
  double group_std = 0.0;
};

// (r_i - mean) / std with population std. A group whose std is <= epsilon
// (ties, a single candidate) gets all-zero advantages. Throws
// std::invalid_argument on an empty group or epsilon <= 0.
AdvantageVector normalize_rewards(std::span<const double> rewards,
                                  double epsilon = kDefaultAdvantageEpsilon);

// normalize_rewards over the composite rewards of the group.
AdvantageVector group_advantages(const CandidateGroup& group,
                                 double epsilon = kDefaultAdvantageEpsilon);

// Per-component advantages, indexed by RewardComponent. Diagnostic only.
std::array<AdvantageVector, 4> component_advantages(
    const CandidateGroup& group, double epsilon = kDefaultAdvantageEpsilon);

struct TelemetryRecord {
  std::int64_t step = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  std::array<double, 4> component_means{};
};

// Pooled statistics over every candidate of every group. `step` is copied
// into the record. Throws std::invalid_argument if there are no candidates.
TelemetryRecord reward_statistics(std::span<const CandidateGroup> groups,
                                  std::int64_t step = 0);

class TelemetrySeries {
 public:
  static constexpr const char* kCsvHeader =
      "step,reward_mean,reward_std,simplicity_mean,fluency_mean,accuracy_mean,"
      "keywords_mean";

  // Throws std::invalid_argument unless record.step exceeds the last step.
  void append(const TelemetryRecord& record);

  const std::vector<TelemetryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  void write_csv(std::ostream& out) const;
  static std::string csv_row(const TelemetryRecord& r);
  // Throws ParseError on a bad header, malformed row or non-monotone steps.
  static TelemetrySeries read_csv(std::istream& in);

 private:
  std::vector<TelemetryRecord> records_;
};

}  // namespace walkguard

#endif  // WALKGUARD_GRPO_HPP_
