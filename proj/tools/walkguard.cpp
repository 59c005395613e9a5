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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "walkguard/cli/commands.hpp"
#include "walkguard/cli/config.hpp"
#include "walkguard/errors.hpp"

namespace {

using namespace walkguard;
using namespace walkguard::cli;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> group_size;
  std::optional<std::string> policy;
  std::optional<std::string> stopwords;
  bool print_config = false;
};

void add_global_flags(CLI::App& app, GlobalFlags& g) {
  app.add_option("--config", g.config_path, "Run configuration file (key = value)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--seed", g.seed, "Training seed (overrides config)");
  app.add_option("--group-size", g.group_size, "Required candidates per group (0 = any)");
  app.add_option("--policy", g.policy, "Trigger rule: current_high, majority, threshold_score");
  app.add_option("--stopwords", g.stopwords, "Stopword list file (overrides config)");
  app.add_flag("--print-config", g.print_config, "Print the effective configuration and exit");
}

// Config file plus command-line overrides. Throws on any invalid value.
RunConfig effective_config(const GlobalFlags& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
  if (g.seed) cfg.training.seed = *g.seed;
  if (g.group_size) cfg.group_size = *g.group_size;
  if (g.stopwords) cfg.stopwords = *g.stopwords;
  if (g.policy) {
    auto rule = parse_trigger_rule(*g.policy);
    if (!rule) throw std::invalid_argument("unknown --policy '" + *g.policy + "'");
    cfg.trigger.rule = *rule;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward scoring, group advantages, danger-trigger simulation and "
               "evaluation for assistive scene descriptions"};
  app.require_subcommand(0, 1);
  GlobalFlags g;
  add_global_flags(app, g);

  std::string samples, embeddings, rewards, stream;
  std::optional<std::string> logprobs, classifier_opt;

  auto* score = app.add_subcommand("score", "Score every candidate with the four rewards");
  score->add_option("samples", samples, "Samples file (JSON Lines)")->required();
  score->add_option("--embeddings", embeddings, "Embedding table")->required();
  score->add_option("--logprobs", logprobs, "Precomputed log2 probabilities (JSON Lines)");

  auto* adv = app.add_subcommand("advantages", "Group-relative advantages from a rewards report");
  adv->add_option("rewards", rewards, "rewards.csv produced by 'score'")->required();

  auto* trig = app.add_subcommand("trigger-sim", "Replay a danger stream through the trigger policy");
  trig->add_option("stream", stream, "Danger stream (JSON Lines)")->required();
  trig->add_option("--classifier", classifier_opt, "Classifier file from 'train-ead'");

  auto* train = app.add_subcommand("train-ead", "Train the reference danger classifier");
  train->add_option("stream", stream, "Labeled stream with features and danger_true")->required();

  auto* eval = app.add_subcommand("evaluate", "ROUGE, keyword density and rewards per sample");
  eval->add_option("samples", samples, "Samples file with one output each")->required();
  eval->add_option("--embeddings", embeddings, "Embedding table")->required();
  eval->add_option("--logprobs", logprobs, "Precomputed log2 probabilities (JSON Lines)");

  // Global flags are accepted after the subcommand too.
  for (auto* sub : {score, adv, trig, train, eval}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  RunConfig cfg;
  try {
    cfg = effective_config(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  if (g.print_config) {
    std::cout << print_config(cfg);
    return kExitOk;
  }

  if (score->parsed()) {
    return cmd_score({samples, embeddings, logprobs, g.out_dir, cfg}, std::cout);
  }
  if (adv->parsed()) return cmd_advantages({rewards, g.out_dir, cfg}, std::cout);
  if (trig->parsed()) return cmd_trigger_sim({stream, classifier_opt, g.out_dir, cfg}, std::cout);
  if (train->parsed()) return cmd_train_ead({stream, g.out_dir, cfg}, std::cout);
  if (eval->parsed()) {
    return cmd_evaluate({samples, embeddings, logprobs, g.out_dir, cfg}, std::cout);
  }
  std::cout << app.help();
  return kExitFatal;
}
