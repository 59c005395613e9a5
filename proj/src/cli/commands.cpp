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

#include "walkguard/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "walkguard/cli/io.hpp"
#include "walkguard/embed.hpp"
#include "walkguard/errors.hpp"
#include "walkguard/format.hpp"
#include "walkguard/grpo.hpp"
#include "walkguard/lm.hpp"
#include "walkguard/metrics.hpp"
#include "walkguard/rewards.hpp"

namespace walkguard::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for problems that abort a whole command (exit 2).
class FatalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

void write_output(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FatalError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw FatalError("failed writing '" + path.string() + "'");
}

// Runs a command body, mapping fatal conditions to exit code 2.
template <typename Fn>
int guarded(std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const FatalError& e) {
    log << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitFatal;
}

void validate_config(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw FatalError(std::string("invalid config: ") + e.what());
  }
}

// Everything shared by score and evaluate.
struct ScoringResources {
  std::unique_ptr<EmbeddingTable> embeddings;
  StopwordSet stopwords;
  std::unique_ptr<BigramModel> bigram;
  std::optional<std::unordered_map<std::string, std::vector<double>>> logprobs;
};

ScoringResources load_resources(const ScoreOptions& opts, const SampleFile& samples,
                                std::ostream& log) {
  ScoringResources res;
  {
    auto in = open_input(opts.embeddings_path, "embeddings file");
    try {
      auto loaded = load_embeddings(in);
      for (const auto& w : loaded.warnings) log << "warning: " << opts.embeddings_path << ": " << w << '\n';
      res.embeddings = std::make_unique<EmbeddingTable>(std::move(loaded.table));
    } catch (const ParseError& e) {
      throw FatalError(opts.embeddings_path + ": " + e.what());
    }
  }
  if (opts.config.stopwords == "builtin") {
    res.stopwords = default_stopwords();
  } else {
    auto in = open_input(opts.config.stopwords, "stopword file");
    res.stopwords = read_stopwords(in);
  }
  if (opts.logprobs_path) {
    auto in = open_input(*opts.logprobs_path, "log-prob file");
    try {
      res.logprobs = read_logprobs(in);
    } catch (const ParseError& e) {
      throw FatalError(*opts.logprobs_path + ": " + e.what());
    }
  }
  std::vector<TokenSequence> corpus;
  if (opts.config.lm_corpus == "references") {
    for (const auto& s : samples.samples) corpus.push_back(tokenize(s.reference));
  } else {
    auto in = open_input(opts.config.lm_corpus, "LM corpus");
    std::string line;
    while (std::getline(in, line)) corpus.push_back(tokenize(line));
  }
  try {
    res.bigram = std::make_unique<BigramModel>(BigramModel::fit(corpus, opts.config.smoothing_alpha));
  } catch (const std::invalid_argument& e) {
    throw FatalError(std::string("cannot fit the reference language model: ") + e.what());
  }
  return res;
}

const std::vector<double>* find_logprobs(const ScoringResources& res, const std::string& key,
                                         const std::string* fallback = nullptr) {
  auto it = res.logprobs->find(key);
  if (it != res.logprobs->end()) return &it->second;
  if (fallback) {
    it = res.logprobs->find(*fallback);
    if (it != res.logprobs->end()) return &it->second;
  }
  return nullptr;
}

json diagnostics_json(const RewardVector& r) {
  const auto& d = r.diagnostics;
  json j = json::object();
  j["output_length"] = d.output_length;
  j["ideal_length"] = d.ideal_length;
  j["perplexity"] = d.perplexity_infinite ? json("inf") : json(d.perplexity);
  j["ngram_diversity"] = d.ngram_diversity;
  j["cosine"] = d.cosine;
  j["mean_token_accuracy"] = d.mean_token_accuracy;
  json hits = json::object();
  for (const auto& [k, n] : d.keyword_hits) hits[k] = n;
  j["keyword_hits"] = std::move(hits);
  return j;
}

std::string errors_jsonl(const std::vector<RecordError>& errors) {
  std::string out;
  for (const auto& e : errors) out += record_error_json(e) + '\n';
  return out;
}

void report_errors(const std::vector<RecordError>& errors, std::ostream& log) {
  for (const auto& e : errors) {
    log << "record error: line " << e.line;
    if (!e.id.empty()) log << " (id " << e.id << ")";
    log << ": " << e.message << '\n';
  }
}

std::vector<RecordError> sorted_errors(std::vector<RecordError> errors) {
  std::stable_sort(errors.begin(), errors.end(),
                   [](const RecordError& a, const RecordError& b) { return a.line < b.line; });
  return errors;
}

SampleFile load_samples(const std::string& path) {
  auto in = open_input(path, "samples file");
  return read_samples(in);
}

}  // namespace

int cmd_score(const ScoreOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(opts.config);
    const SampleFile samples = load_samples(opts.samples_path);
    const ScoringResources res = load_resources(opts, samples, log);
    ScoringContext ctx{opts.config.reward, res.embeddings.get(), res.bigram.get(), &res.stopwords};

    std::vector<RecordError> errors = samples.errors;
    std::ostringstream csv, diag;
    csv << kRewardsCsvHeader << '\n';
    std::size_t scored = 0;
    for (const auto& s : samples.samples) {
      if (s.candidates.empty()) {
        errors.push_back({s.line, s.id, "no candidates to score"});
        continue;
      }
      const std::string group = s.group_id.value_or(s.id);
      std::optional<KeywordSet> keywords;
      if (s.keywords) keywords = explicit_keywords(*s.keywords);
      for (std::size_t k = 0; k < s.candidates.size(); ++k) {
        CandidateOptions copt;
        if (keywords) copt.keywords = &*keywords;
        std::optional<PrecomputedScorer> pre;
        if (res.logprobs) {
          const auto* lp = find_logprobs(res, s.id + "#" + std::to_string(k));
          if (!lp) {
            errors.push_back({s.line, s.id, "candidate " + std::to_string(k) +
                                                ": fluency: no log-probs for '" + s.id + "#" +
                                                std::to_string(k) + "'"});
            continue;
          }
          pre.emplace(*lp);
          copt.scorer = &*pre;
        }
        RewardVector r;
        try {
          r = score_candidate(s.candidates[k], s.reference, ctx, copt);
        } catch (const std::exception& e) {
          errors.push_back({s.line, s.id, "candidate " + std::to_string(k) + ": " + e.what()});
          continue;
        }
        csv << csv_join({s.id, group, std::to_string(k), format_real(r.simplicity),
                         format_real(r.fluency), format_real(r.accuracy),
                         format_real(r.keywords), format_real(r.composite)})
            << '\n';
        json d = diagnostics_json(r);
        d["id"] = s.id;
        d["candidate"] = k;
        diag << d.dump() << '\n';
        ++scored;
      }
    }
    errors = sorted_errors(std::move(errors));
    write_output(opts.out_dir, "rewards.csv", csv.str());
    write_output(opts.out_dir, "rewards.jsonl", diag.str());
    write_output(opts.out_dir, "errors.jsonl", errors_jsonl(errors));
    report_errors(errors, log);
    log << "scored " << scored << " candidates, " << errors.size() << " record errors\n";
    return errors.empty() ? kExitOk : kExitPartial;
  });
}

int cmd_advantages(const AdvantageOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(opts.config);
    auto in = open_input(opts.rewards_path, "rewards report");
    std::string line;
    if (!std::getline(in, line) || csv_split(line) != csv_split(kRewardsCsvHeader)) {
      throw FatalError(opts.rewards_path + ": expected header '" + kRewardsCsvHeader + "'");
    }
    struct Row {
      std::string id, group, candidate;
      long long candidate_index = 0;
      RewardVector reward;
    };
    std::vector<Row> rows;
    std::vector<std::string> missing;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      std::vector<std::string> f;
      try {
        f = csv_split(line);
      } catch (const std::invalid_argument& e) {
        throw FatalError(opts.rewards_path + ": line " + std::to_string(lineno) + ": " + e.what());
      }
      if (f.size() != 8) {
        throw FatalError(opts.rewards_path + ": line " + std::to_string(lineno) + ": expected 8 fields");
      }
      Row r{f[0], f[1], f[2], 0, {}};
      double* targets[] = {&r.reward.simplicity, &r.reward.fluency, &r.reward.accuracy,
                           &r.reward.keywords, &r.reward.composite};
      for (int k = 0; k < 5; ++k) {
        if (!parse_real(f[3 + k], *targets[k])) {
          throw FatalError(opts.rewards_path + ": line " + std::to_string(lineno) +
                           ": bad number '" + f[3 + k] + "'");
        }
      }
      try {
        r.candidate_index = std::stoll(r.candidate);
      } catch (const std::exception&) {
        throw FatalError(opts.rewards_path + ": line " + std::to_string(lineno) +
                         ": bad candidate index '" + r.candidate + "'");
      }
      if (r.group.empty()) missing.push_back(r.id + "#" + r.candidate);
      rows.push_back(std::move(r));
    }
    if (!missing.empty()) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw FatalError("rows without a group id: " + list);
    }
    if (rows.empty()) throw FatalError(opts.rewards_path + ": no scored candidates");

    // Members of each group in canonical (id, candidate) order so the result
    // does not depend on row order.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i) groups[rows[i].group].push_back(i);
    if (opts.config.group_size > 0) {
      std::string bad;
      for (const auto& [g, members] : groups) {
        if (members.size() != static_cast<std::size_t>(opts.config.group_size)) {
          bad += (bad.empty() ? "" : ", ") + g + " (" + std::to_string(members.size()) + ")";
        }
      }
      if (!bad.empty()) {
        throw FatalError("groups whose size differs from " + std::to_string(opts.config.group_size) +
                         ": " + bad);
      }
    }

    std::vector<double> advantage(rows.size());
    std::vector<std::pair<double, double>> moments(rows.size());
    std::vector<CandidateGroup> all_groups;
    for (auto& [g, members] : groups) {
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].id != rows[b].id) return rows[a].id < rows[b].id;
        return rows[a].candidate_index < rows[b].candidate_index;
      });
      CandidateGroup cg{g, {}};
      for (std::size_t i : members) cg.candidates.push_back({rows[i].id, rows[i].reward});
      const AdvantageVector adv = group_advantages(cg, opts.config.advantage_epsilon);
      for (std::size_t k = 0; k < members.size(); ++k) {
        advantage[members[k]] = adv.advantages[k];
        moments[members[k]] = {adv.group_mean, adv.group_std};
      }
      all_groups.push_back(std::move(cg));
    }

    std::ostringstream csv;
    csv << kAdvantagesCsvHeader << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv << csv_join({rows[i].id, rows[i].group, rows[i].candidate,
                       format_real(rows[i].reward.composite), format_real(advantage[i]),
                       format_real(moments[i].first), format_real(moments[i].second)})
          << '\n';
    }
    TelemetrySeries series;
    series.append(reward_statistics(all_groups, 1));
    std::ostringstream telemetry;
    series.write_csv(telemetry);

    write_output(opts.out_dir, "advantages.csv", csv.str());
    write_output(opts.out_dir, "telemetry.csv", telemetry.str());
    log << "computed advantages for " << rows.size() << " candidates in " << groups.size()
        << " groups\n";
    return kExitOk;
  });
}

int cmd_trigger_sim(const TriggerSimOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(opts.config);
    auto in = open_input(opts.stream_path, "danger stream");
    std::vector<FrameRecord> frames;
    try {
      frames = read_stream(in);
    } catch (const ParseError& e) {
      throw FatalError(opts.stream_path + ": " + e.what());
    }
    std::optional<MlpClassifier> clf;
    if (opts.classifier_path) {
      auto cin = open_input(*opts.classifier_path, "classifier file");
      try {
        clf = read_classifier(cin);
      } catch (const ParseError& e) {
        throw FatalError(*opts.classifier_path + ": " + e.what());
      } catch (const std::invalid_argument& e) {
        throw FatalError(*opts.classifier_path + ": " + e.what());
      }
    }
    const auto& policy = opts.config.trigger;
    const auto decisions = simulate_stream(frames, clf ? &*clf : nullptr, policy);

    std::ostringstream jsonl;
    write_trigger_jsonl(jsonl, decisions);

    const auto triggers = std::count_if(decisions.begin(), decisions.end(),
                                        [](const TriggerDecision& d) { return d.trigger; });
    const double rate = decisions.empty() ? 0.0
                                          : static_cast<double>(triggers) /
                                                static_cast<double>(decisions.size());
    json summary = json::object();
    summary["rule"] = to_string(policy.rule);
    summary["window"] = policy.window;
    summary["frames"] = decisions.size();
    summary["triggers"] = triggers;
    summary["trigger_rate"] = rate;
    const bool labeled = !frames.empty() && std::all_of(frames.begin(), frames.end(),
                                                        [](const FrameRecord& f) {
                                                          return f.true_level.has_value();
                                                        });
    std::optional<double> trf;
    if (labeled) {
      std::vector<DangerLevel> pred, truth;
      for (std::size_t i = 0; i < frames.size(); ++i) {
        pred.push_back(decisions[i].level);
        truth.push_back(*frames[i].true_level);
      }
      trf = trf_score(pred, truth);
    }
    summary["trf"] = trf ? json(*trf) : json(nullptr);

    write_output(opts.out_dir, "triggers.jsonl", jsonl.str());
    write_output(opts.out_dir, "trigger_summary.json", summary.dump(2) + "\n");
    log << "rule: " << to_string(policy.rule) << " (window " << policy.window << ")\n"
        << "frames: " << decisions.size() << "\n"
        << "triggers: " << triggers << "\n"
        << "trigger_rate: " << format_real(rate) << "\n"
        << "trf: " << (trf ? format_real(*trf) : std::string("n/a (no danger_true labels)")) << "\n";
    return kExitOk;
  });
}

int cmd_train_ead(const TrainOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(opts.config);
    auto in = open_input(opts.stream_path, "labeled stream");
    std::vector<FrameRecord> frames;
    try {
      frames = read_stream(in);
    } catch (const ParseError& e) {
      throw FatalError(opts.stream_path + ": " + e.what());
    }
    std::vector<LabeledExample> data;
    std::string unusable;
    for (const auto& f : frames) {
      if (!f.features || !f.true_level) {
        unusable += (unusable.empty() ? "" : ", ") + f.frame_id;
        continue;
      }
      data.push_back({*f.features, *f.true_level});
    }
    if (!unusable.empty()) throw FatalError("frames missing features or danger_true: " + unusable);
    TrainingResult result = [&] {
      try {
        return train_classifier(data, opts.config.training);
      } catch (const TrainingError& e) {
        throw FatalError(std::string("training failed: ") + e.what());
      }
    }();

    std::ostringstream clf, history;
    write_classifier(clf, result.classifier);
    history << kLossHistoryCsvHeader << '\n';
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
      history << (e + 1) << ',' << format_real(result.loss_history[e]) << ','
              << format_real(result.accuracy_history[e]) << '\n';
    }
    write_output(opts.out_dir, "ead_classifier.txt", clf.str());
    write_output(opts.out_dir, "loss_history.csv", history.str());
    log << "trained on " << data.size() << " frames for " << opts.config.training.epochs
        << " epochs\nfinal loss: " << format_real(result.loss_history.back())
        << "\nfinal accuracy: " << format_real(result.accuracy_history.back()) << '\n';
    return kExitOk;
  });
}

int cmd_evaluate(const ScoreOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    validate_config(opts.config);
    const SampleFile samples = load_samples(opts.samples_path);
    const ScoringResources res = load_resources(opts, samples, log);
    ScoringContext ctx{opts.config.reward, res.embeddings.get(), res.bigram.get(), &res.stopwords};

    std::vector<RecordError> errors = samples.errors;
    std::ostringstream csv, diag;
    csv << kMetricsCsvHeader << '\n';
    constexpr int kColumns = 9;
    std::array<double, kColumns> sums{};
    std::size_t rows = 0;
    for (const auto& s : samples.samples) {
      if (s.candidates.size() != 1) {
        errors.push_back({s.line, s.id, "expected exactly one output to evaluate, found " +
                                            std::to_string(s.candidates.size())});
        continue;
      }
      const std::string& output = s.candidates.front();
      const TokenSequence gen = tokenize(output);
      const TokenSequence ref = tokenize(s.reference);
      const KeywordSet keywords = s.keywords ? explicit_keywords(*s.keywords)
                                             : extract_keywords(ref, res.stopwords);
      CandidateOptions copt;
      copt.keywords = &keywords;
      std::optional<PrecomputedScorer> pre;
      if (res.logprobs) {
        const std::string key = s.id + "#0";
        const auto* lp = find_logprobs(res, key, &s.id);
        if (!lp) {
          errors.push_back({s.line, s.id, "fluency: no log-probs for '" + key + "'"});
          continue;
        }
        pre.emplace(*lp);
        copt.scorer = &*pre;
      }
      RewardVector r;
      try {
        r = score_candidate(output, s.reference, ctx, copt);
      } catch (const std::exception& e) {
        errors.push_back({s.line, s.id, e.what()});
        continue;
      }
      const SynonymMap synonyms =
          build_synonym_map(*res.embeddings, keywords, opts.config.reward.synonym_threshold);
      const std::array<double, kColumns> values = {
          rouge_n(gen, ref, 1).f1,
          rouge_n(gen, ref, 2).f1,
          rouge_l(gen, ref).f1,
          keyword_density(gen, keywords, synonyms),
          r.simplicity,
          r.fluency,
          r.accuracy,
          r.keywords,
          r.composite};
      std::vector<std::string> fields = {s.id};
      for (int c = 0; c < kColumns; ++c) {
        sums[c] += values[c];
        fields.push_back(format_real(values[c]));
      }
      csv << csv_join(fields) << '\n';
      json d = diagnostics_json(r);
      d["id"] = s.id;
      d["keyword_density_rule"] = "synonym-set token occurrences / output tokens";
      diag << d.dump() << '\n';
      ++rows;
    }
    std::vector<std::string> mean = {"MEAN"};
    for (double s : sums) {
      mean.push_back(rows ? format_real(s / static_cast<double>(rows)) : std::string("nan"));
    }
    csv << csv_join(mean) << '\n';

    errors = sorted_errors(std::move(errors));
    write_output(opts.out_dir, "metrics.csv", csv.str());
    write_output(opts.out_dir, "metrics.jsonl", diag.str());
    write_output(opts.out_dir, "errors.jsonl", errors_jsonl(errors));
    report_errors(errors, log);
    log << "evaluated " << rows << " samples, " << errors.size() << " record errors\n";
    return errors.empty() ? kExitOk : kExitPartial;
  });
}

}  // namespace walkguard::cli
