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

// Batch commands behind the walkguard tool. Each returns the process exit
// code: 0 success, 1 some records failed, 2 fatal (bad config or input file).
// Outputs go to files under out_dir; progress and errors go to `log`.

#ifndef WALKGUARD_CLI_COMMANDS_HPP_
#define WALKGUARD_CLI_COMMANDS_HPP_

#include <optional>
#include <ostream>
#include <string>

#include "walkguard/cli/config.hpp"

namespace walkguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitFatal = 2;

inline constexpr const char* kRewardsCsvHeader =
    "id,group_id,candidate,simplicity,fluency,accuracy,keywords,composite";
inline constexpr const char* kAdvantagesCsvHeader =
    "id,group_id,candidate,composite,advantage,group_mean,group_std";
inline constexpr const char* kMetricsCsvHeader =
    "id,rouge1_f,rouge2_f,rougeL_f,keyword_density,simplicity,fluency,accuracy,"
    "keywords,composite";
inline constexpr const char* kLossHistoryCsvHeader = "epoch,loss,accuracy";

struct ScoreOptions {
  std::string samples_path;
  std::string embeddings_path;
  std::optional<std::string> logprobs_path;
  std::string out_dir = ".";
  RunConfig config;
};

// rewards.csv, rewards.jsonl (per-candidate diagnostics), errors.jsonl.
// Precomputed log-probs are looked up as "<id>#<candidate index>".
int cmd_score(const ScoreOptions& opts, std::ostream& log);

struct AdvantageOptions {
  std::string rewards_path;
  std::string out_dir = ".";
  RunConfig config;
};

// advantages.csv and telemetry.csv from a rewards.csv report.
int cmd_advantages(const AdvantageOptions& opts, std::ostream& log);

struct TriggerSimOptions {
  std::string stream_path;
  std::optional<std::string> classifier_path;
  std::string out_dir = ".";
  RunConfig config;
};

// triggers.jsonl and trigger_summary.json; the summary is also printed.
int cmd_trigger_sim(const TriggerSimOptions& opts, std::ostream& log);

struct TrainOptions {
  std::string stream_path;
  std::string out_dir = ".";
  RunConfig config;
};

// ead_classifier.txt and loss_history.csv.
int cmd_train_ead(const TrainOptions& opts, std::ostream& log);

// metrics.csv (one row per sample plus MEAN), metrics.jsonl, errors.jsonl.
// Each sample must carry exactly one candidate; its log-probs are looked up
// as "<id>#0" or "<id>".
int cmd_evaluate(const ScoreOptions& opts, std::ostream& log);

}  // namespace walkguard::cli

#endif  // WALKGUARD_CLI_COMMANDS_HPP_
