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

#include "walkguard/grpo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "walkguard/errors.hpp"
#include "walkguard/format.hpp"

namespace walkguard {
namespace {

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

// Two-pass population moments.
Moments population_moments(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  Moments m;
  m.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / n);
  return m;
}

}  // namespace

AdvantageVector normalize_rewards(std::span<const double> rewards, double epsilon) {
  if (rewards.empty()) throw std::invalid_argument("group_advantages: empty group");
  if (!(epsilon > 0.0)) throw std::invalid_argument("group_advantages: epsilon must be > 0");
  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  // Everything below depends only on the centered numerators n*r - sum, which
  // a shift of all rewards leaves unchanged whenever the shifted inputs are
  // exact. Dividing by n only at the end keeps the advantages bit-identical
  // under such shifts.
  std::vector<double> centered(rewards.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    centered[i] = n * rewards[i] - sum;
    ss += centered[i] * centered[i];
  }
  const double scale = std::sqrt(ss / n);  // n * population std
  AdvantageVector out;
  out.group_mean = sum / n;
  out.group_std = scale / n;
  out.advantages.assign(rewards.size(), 0.0);
  if (out.group_std <= epsilon) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out.advantages[i] = centered[i] / scale;
  return out;
}

AdvantageVector group_advantages(const CandidateGroup& group, double epsilon) {
  std::vector<double> r;
  r.reserve(group.candidates.size());
  for (const auto& c : group.candidates) r.push_back(c.reward.composite);
  return normalize_rewards(r, epsilon);
}

std::array<AdvantageVector, 4> component_advantages(const CandidateGroup& group,
                                                    double epsilon) {
  std::array<AdvantageVector, 4> out;
  for (int c = 0; c < 4; ++c) {
    std::vector<double> r;
    for (const auto& cand : group.candidates) {
      r.push_back(cand.reward.component(static_cast<RewardComponent>(c)));
    }
    out[c] = normalize_rewards(r, epsilon);
  }
  return out;
}

TelemetryRecord reward_statistics(std::span<const CandidateGroup> groups,
                                  std::int64_t step) {
  std::vector<double> composite;
  std::array<double, 4> sums{};
  for (const auto& g : groups) {
    for (const auto& c : g.candidates) {
      composite.push_back(c.reward.composite);
      for (int k = 0; k < 4; ++k) {
        sums[k] += c.reward.component(static_cast<RewardComponent>(k));
      }
    }
  }
  if (composite.empty()) {
    throw std::invalid_argument("reward_statistics: no candidates");
  }
  const Moments m = population_moments(composite);
  TelemetryRecord rec;
  rec.step = step;
  rec.reward_mean = m.mean;
  rec.reward_std = m.std;
  for (int k = 0; k < 4; ++k) {
    rec.component_means[k] = sums[k] / static_cast<double>(composite.size());
  }
  return rec;
}

void TelemetrySeries::append(const TelemetryRecord& record) {
  if (!records_.empty() && record.step <= records_.back().step) {
    throw std::invalid_argument("telemetry_append: step " + std::to_string(record.step) +
                                " does not follow step " +
                                std::to_string(records_.back().step));
  }
  if (!(record.reward_std >= 0.0)) {
    throw std::invalid_argument("telemetry_append: negative reward std");
  }
  records_.push_back(record);
}

std::string TelemetrySeries::csv_row(const TelemetryRecord& r) {
  std::string row = std::to_string(r.step);
  row += "," + format_real(r.reward_mean);
  row += "," + format_real(r.reward_std);
  for (double m : r.component_means) row += "," + format_real(m);
  return row;
}

void TelemetrySeries::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  for (const auto& r : records_) out << csv_row(r) << '\n';
}

TelemetrySeries TelemetrySeries::read_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError(1, "expected telemetry header '" + std::string(kCsvHeader) + "'");
  }
  TelemetrySeries series;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 7) throw ParseError(lineno, "expected 7 fields");
    TelemetryRecord r;
    try {
      std::size_t used = 0;
      r.step = std::stoll(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("step");
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad step '" + fields[0] + "'");
    }
    double* targets[] = {&r.reward_mean, &r.reward_std, &r.component_means[0],
                         &r.component_means[1], &r.component_means[2],
                         &r.component_means[3]};
    for (int k = 0; k < 6; ++k) {
      if (!parse_real(fields[k + 1], *targets[k])) {
        throw ParseError(lineno, "bad number '" + fields[k + 1] + "'");
      }
    }
    try {
      series.append(r);
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return series;
}

}  // namespace walkguard
