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


// Python bindings. Token sequences cross the boundary as lists of strings;
// danger streams as strings of level letters ("AABC").

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "walkguard/cli/commands.hpp"
#include "walkguard/cli/config.hpp"
#include "walkguard/ead.hpp"
#include "walkguard/embed.hpp"
#include "walkguard/errors.hpp"
#include "walkguard/grpo.hpp"
#include "walkguard/lm.hpp"
#include "walkguard/metrics.hpp"
#include "walkguard/rewards.hpp"
#include "walkguard/text.hpp"

namespace py = pybind11;
using namespace walkguard;

namespace {

TokenSequence seq(std::vector<std::string> tokens) { return TokenSequence{std::move(tokens), ""}; }

KeywordSet keyword_set(std::vector<std::string> words) {
  KeywordSet k;
  k.keywords = std::move(words);
  k.origin = KeywordSet::Origin::kExplicit;
  return k;
}

SynonymMap synonym_map(const std::map<std::string, std::set<std::string>>& entries) {
  SynonymMap m;
  m.entries = entries;
  return m;
}

std::vector<DangerLevel> levels(const std::string& letters) {
  std::vector<DangerLevel> out;
  for (char ch : letters) {
    auto l = parse_danger_level(std::string_view(&ch, 1));
    if (!l) throw std::invalid_argument(std::string("bad danger level '") + ch + "'");
    out.push_back(*l);
  }
  return out;
}

std::string letters(const std::vector<DangerLevel>& ls) {
  std::string out;
  for (auto l : ls) out += to_char(l);
  return out;
}

py::dict rouge_dict(const RougeScore& s) {
  py::dict d;
  d["precision"] = s.precision;
  d["recall"] = s.recall;
  d["f1"] = s.f1;
  return d;
}

py::dict reward_dict(const RewardVector& r) {
  py::dict d;
  d["simplicity"] = r.simplicity;
  d["fluency"] = r.fluency;
  d["accuracy"] = r.accuracy;
  d["keywords"] = r.keywords;
  d["composite"] = r.composite;
  d["perplexity"] = r.diagnostics.perplexity_infinite
                        ? std::numeric_limits<double>::infinity()
                        : r.diagnostics.perplexity;
  d["cosine"] = r.diagnostics.cosine;
  d["mean_token_accuracy"] = r.diagnostics.mean_token_accuracy;
  return d;
}

cli::RunConfig run_config(const std::optional<std::string>& path) {
  return path ? cli::load_config(*path) : cli::RunConfig{};
}

}  // namespace

PYBIND11_MODULE(_walkguard, m) {
  m.doc() = "Reward scoring, group advantages, danger triggers and text metrics";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<OutOfVocabularyError>(m, "OutOfVocabularyError", PyExc_KeyError);
  py::register_exception<RewardError>(m, "RewardError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  // text
  m.def("tokenize", [](const std::string& text) { return tokenize(text).tokens; }, py::arg("text"));
  m.def("ngram_counts",
        [](std::vector<std::string> tokens, int order) {
          const auto p = extract_ngrams(seq(std::move(tokens)), order);
          return py::make_tuple(p.distinct_count, p.total_count);
        },
        py::arg("tokens"), py::arg("order"), "(distinct, total) n-gram counts");
  m.def("ngram_diversity",
        [](std::vector<std::string> tokens, int order) {
          return ngram_diversity(extract_ngrams(seq(std::move(tokens)), order));
        },
        py::arg("tokens"), py::arg("order"));
  m.def("mean_token_accuracy",
        [](std::vector<std::string> gen, std::vector<std::string> annt) {
          return mean_token_accuracy(seq(std::move(gen)), seq(std::move(annt)));
        },
        py::arg("gen"), py::arg("annt"));
  m.def("extract_keywords",
        [](std::vector<std::string> tokens, std::optional<std::set<std::string>> stopwords) {
          StopwordSet stop;
          if (stopwords) stop.insert(stopwords->begin(), stopwords->end());
          return extract_keywords(seq(std::move(tokens)), stopwords ? stop : default_stopwords())
              .keywords;
        },
        py::arg("tokens"), py::arg("stopwords") = py::none(),
        "Keywords in first-seen order; the built-in stopword list when none is given");

  // language model
  py::class_<BigramModel>(m, "BigramModel")
      .def_static("fit",
                  [](const std::vector<std::vector<std::string>>& corpus, double alpha) {
                    std::vector<TokenSequence> c;
                    for (const auto& s : corpus) c.push_back(seq(s));
                    return BigramModel::fit(c, alpha);
                  },
                  py::arg("corpus"), py::arg("alpha") = 1.0)
      .def("probability", &BigramModel::probability, py::arg("prev"), py::arg("word"))
      .def("log2_probs",
           [](const BigramModel& lm, std::vector<std::string> tokens) {
             return score_tokens(lm, seq(std::move(tokens))).log2_probs;
           },
           py::arg("tokens"))
      .def_property_readonly("vocab_size", &BigramModel::vocab_size)
      .def_property_readonly("vocabulary", &BigramModel::vocabulary);
  m.def("perplexity", [](std::vector<double> lp) { return perplexity({std::move(lp)}).value; },
        py::arg("log2_probs"), "Base-2 perplexity; inf when some probability is 0");

  // embeddings
  py::class_<EmbeddingTable>(m, "EmbeddingTable")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_static("load",
                  [](const std::string& path) {
                    std::ifstream in(path);
                    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
                    return load_embeddings(in).table;
                  },
                  py::arg("path"))
      .def("insert", &EmbeddingTable::insert, py::arg("token"), py::arg("vector"))
      .def("get",
           [](const EmbeddingTable& t, const std::string& token) -> std::optional<Vector> {
             const Vector* v = t.find(token);
             return v ? std::optional<Vector>(*v) : std::nullopt;
           },
           py::arg("token"))
      .def("__contains__", &EmbeddingTable::contains)
      .def("__len__", &EmbeddingTable::size)
      .def_property_readonly("dim", &EmbeddingTable::dim)
      .def_property_readonly("tokens", &EmbeddingTable::tokens);
  m.def("cosine_similarity",
        [](const Vector& a, const Vector& b) { return cosine_similarity(a, b); }, py::arg("a"),
        py::arg("b"));
  m.def("embed_text",
        [](const EmbeddingTable& t, std::vector<std::string> tokens) {
          return embed_text(t, seq(std::move(tokens)));
        },
        py::arg("table"), py::arg("tokens"));
  m.def("synonym_set", &synonym_set, py::arg("table"), py::arg("keyword"),
        py::arg("threshold") = 0.9);

  // rewards
  m.def("simplicity_reward",
        [](std::size_t length, int ideal_length, double r_max, std::optional<double> floor) {
          RewardConfig cfg;
          cfg.ideal_length = ideal_length;
          cfg.r_max = r_max;
          cfg.simplicity_floor = floor;
          return simplicity_reward(length, cfg);
        },
        py::arg("length"), py::arg("ideal_length"), py::arg("r_max") = 1.0,
        py::arg("floor") = py::none());
  m.def("fluency_reward",
        [](double diversity, double ppl) {
          return fluency_from_parts(diversity, {ppl, std::isinf(ppl)});
        },
        py::arg("diversity"), py::arg("perplexity"));
  m.def("accuracy_reward",
        [](std::vector<std::string> gen, std::vector<std::string> annt, const EmbeddingTable& t) {
          return accuracy_reward(seq(std::move(gen)), seq(std::move(annt)), t);
        },
        py::arg("gen"), py::arg("annt"), py::arg("table"));
  m.def("keywords_reward",
        [](std::vector<std::string> gen, std::vector<std::string> keywords,
           const std::map<std::string, std::set<std::string>>& synonyms, bool clip) {
          return keywords_reward(seq(std::move(gen)), keyword_set(std::move(keywords)),
                                 synonym_map(synonyms), clip);
        },
        py::arg("gen"), py::arg("keywords"), py::arg("synonyms"), py::arg("clip") = false);
  m.def("score_candidate",
        [](const std::string& gen, const std::string& annt, const EmbeddingTable& table,
           const BigramModel& lm, std::optional<std::vector<std::string>> keywords,
           std::optional<std::string> config_path) {
          ScoringContext ctx;
          ctx.config = run_config(config_path).reward;
          ctx.embeddings = &table;
          ctx.scorer = &lm;
          std::optional<KeywordSet> ks;
          CandidateOptions opts;
          if (keywords) {
            ks = explicit_keywords(*keywords);
            opts.keywords = &*ks;
          }
          return reward_dict(score_candidate(gen, annt, ctx, opts));
        },
        py::arg("gen"), py::arg("annt"), py::arg("table"), py::arg("lm"),
        py::arg("keywords") = py::none(), py::arg("config") = py::none(),
        "All four rewards and their weighted sum for one candidate");

  // group advantages
  m.def("group_advantages",
        [](const std::vector<double>& rewards, double epsilon) {
          const auto a = normalize_rewards(rewards, epsilon);
          return py::make_tuple(a.advantages, a.group_mean, a.group_std);
        },
        py::arg("rewards"), py::arg("epsilon") = kDefaultAdvantageEpsilon,
        "(advantages, mean, population std)");

  // danger triggers
  m.def("decide_trigger",
        [](const std::string& window, const std::string& rule, const std::string& min_level,
           double threshold) {
          TriggerPolicyConfig p;
          p.window = static_cast<int>(window.size()) - 1;
          auto r = parse_trigger_rule(rule);
          if (!r) throw std::invalid_argument("unknown rule '" + rule + "'");
          p.rule = *r;
          p.min_level = levels(min_level).at(0);
          p.score_threshold = threshold;
          p.validate();
          return decide_trigger(levels(window), p);
        },
        py::arg("window"), py::arg("rule") = "majority", py::arg("min_level") = "C",
        py::arg("threshold") = 0.5, "Decision for the newest (last) frame of the window");
  m.def("simulate_stream",
        [](const std::string& stream, int window, const std::string& rule) {
          TriggerPolicyConfig p;
          p.window = window;
          auto r = parse_trigger_rule(rule);
          if (!r) throw std::invalid_argument("unknown rule '" + rule + "'");
          p.rule = *r;
          std::vector<FrameRecord> frames;
          for (DangerLevel l : levels(stream)) {
            FrameRecord f;
            f.frame_id = std::to_string(frames.size());
            f.predicted_level = l;
            frames.push_back(f);
          }
          std::vector<bool> out;
          for (const auto& d : simulate_stream(frames, nullptr, p)) out.push_back(d.trigger);
          return out;
        },
        py::arg("levels"), py::arg("window") = 3, py::arg("rule") = "majority");

  // classifier
  py::class_<MlpClassifier>(m, "Classifier")
      .def("predict_proba",
           [](const MlpClassifier& c, const std::vector<double>& x) { return c.forward(x); },
           py::arg("features"))
      .def("predict",
           [](const MlpClassifier& c, const std::vector<double>& x) {
             return to_string(classify(c.forward(x)));
           },
           py::arg("features"))
      .def("to_text",
           [](const MlpClassifier& c) {
             std::ostringstream out;
             write_classifier(out, c);
             return out.str();
           })
      .def_static("from_text",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return read_classifier(in);
                  },
                  py::arg("text"))
      .def_property_readonly("input_dim", &MlpClassifier::input_dim)
      .def_property_readonly("hidden_dims", &MlpClassifier::hidden_dims);
  m.def("train_classifier",
        [](const std::vector<std::vector<double>>& features, const std::string& labels,
           std::vector<std::size_t> hidden, double learning_rate, int epochs,
           std::size_t batch_size, std::uint64_t seed) {
          const auto ls = levels(labels);
          if (ls.size() != features.size()) {
            throw std::invalid_argument("features and labels differ in length");
          }
          std::vector<LabeledExample> data;
          for (std::size_t i = 0; i < ls.size(); ++i) data.push_back({features[i], ls[i]});
          TrainingConfig cfg;
          cfg.hidden_dims = std::move(hidden);
          cfg.learning_rate = learning_rate;
          cfg.epochs = epochs;
          cfg.batch_size = batch_size;
          cfg.seed = seed;
          auto r = train_classifier(data, cfg);
          return py::make_tuple(std::move(r.classifier), r.loss_history, r.accuracy_history);
        },
        py::arg("features"), py::arg("labels"), py::arg("hidden") = std::vector<std::size_t>{8},
        py::arg("learning_rate") = 0.5, py::arg("epochs") = 4, py::arg("batch_size") = 10,
        py::arg("seed") = 42, "(classifier, loss_history, accuracy_history)");

  // metrics
  m.def("rouge_n",
        [](std::vector<std::string> gen, std::vector<std::string> ref, int n) {
          return rouge_dict(rouge_n(seq(std::move(gen)), seq(std::move(ref)), n));
        },
        py::arg("gen"), py::arg("ref"), py::arg("n") = 1);
  m.def("rouge_l",
        [](std::vector<std::string> gen, std::vector<std::string> ref) {
          return rouge_dict(rouge_l(seq(std::move(gen)), seq(std::move(ref))));
        },
        py::arg("gen"), py::arg("ref"));
  m.def("keyword_density",
        [](std::vector<std::string> gen, std::vector<std::string> keywords,
           const std::map<std::string, std::set<std::string>>& synonyms) {
          return keyword_density(seq(std::move(gen)), keyword_set(std::move(keywords)),
                                 synonym_map(synonyms));
        },
        py::arg("gen"), py::arg("keywords"), py::arg("synonyms"));
  m.def("trf_score",
        [](const std::string& pred, const std::string& truth) {
          return trf_score(levels(pred), levels(truth));
        },
        py::arg("pred"), py::arg("truth"));

  // batch commands: (exit code, log text)
  auto wrap = [](auto&& fn) {
    std::ostringstream log;
    const int rc = fn(log);
    return py::make_tuple(rc, log.str());
  };
  m.def("run_score",
        [wrap](const std::string& samples, const std::string& embeddings, const std::string& out,
               std::optional<std::string> logprobs, std::optional<std::string> config) {
          return wrap([&](std::ostream& log) {
            return cli::cmd_score({samples, embeddings, logprobs, out, run_config(config)}, log);
          });
        },
        py::arg("samples"), py::arg("embeddings"), py::arg("out"),
        py::arg("logprobs") = py::none(), py::arg("config") = py::none());
  m.def("run_advantages",
        [wrap](const std::string& rewards, const std::string& out, std::optional<std::string> config) {
          return wrap([&](std::ostream& log) {
            return cli::cmd_advantages({rewards, out, run_config(config)}, log);
          });
        },
        py::arg("rewards"), py::arg("out"), py::arg("config") = py::none());
  m.def("run_evaluate",
        [wrap](const std::string& samples, const std::string& embeddings, const std::string& out,
               std::optional<std::string> logprobs, std::optional<std::string> config) {
          return wrap([&](std::ostream& log) {
            return cli::cmd_evaluate({samples, embeddings, logprobs, out, run_config(config)}, log);
          });
        },
        py::arg("samples"), py::arg("embeddings"), py::arg("out"),
        py::arg("logprobs") = py::none(), py::arg("config") = py::none());
  m.def("run_trigger_sim",
        [wrap](const std::string& stream, const std::string& out,
               std::optional<std::string> classifier, std::optional<std::string> config) {
          return wrap([&](std::ostream& log) {
            return cli::cmd_trigger_sim({stream, classifier, out, run_config(config)}, log);
          });
        },
        py::arg("stream"), py::arg("out"), py::arg("classifier") = py::none(),
        py::arg("config") = py::none());
  m.def("run_train_ead",
        [wrap](const std::string& stream, const std::string& out, std::optional<std::string> config) {
          return wrap([&](std::ostream& log) {
            return cli::cmd_train_ead({stream, out, run_config(config)}, log);
          });
        },
        py::arg("stream"), py::arg("out"), py::arg("config") = py::none());
  m.def("default_config", [] { return cli::print_config(cli::RunConfig{}); });
  m.attr("__version__") = "0.1.0";
}
