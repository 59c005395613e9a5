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

#include "walkguard/ead.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "walkguard/errors.hpp"
#include "walkguard/format.hpp"
#include "walkguard/random.hpp"

namespace walkguard {

char to_char(DangerLevel level) { return static_cast<char>('A' + static_cast<int>(level)); }

std::string to_string(DangerLevel level) { return std::string(1, to_char(level)); }

std::optional<DangerLevel> parse_danger_level(std::string_view s) {
  if (s == "A") return DangerLevel::kA;
  if (s == "B") return DangerLevel::kB;
  if (s == "C") return DangerLevel::kC;
  return std::nullopt;
}

Distribution3 one_hot(DangerLevel level) {
  Distribution3 d{0.0, 0.0, 0.0};
  d[static_cast<int>(level)] = 1.0;
  return d;
}

DangerLevel classify(const Distribution3& dist) {
  int best = 0;
  for (int k = 1; k < kNumDangerLevels; ++k) {
    if (dist[k] >= dist[best]) best = k;
  }
  return static_cast<DangerLevel>(best);
}

// ---------------------------------------------------------------------------

MlpClassifier::MlpClassifier(std::size_t input_dim, std::vector<std::size_t> hidden_dims) {
  if (input_dim == 0) throw std::invalid_argument("classifier input_dim must be >= 1");
  std::size_t prev = input_dim;
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw std::invalid_argument("hidden layer sizes must be >= 1");
    layers_.emplace_back(prev, h);
    prev = h;
  }
  layers_.emplace_back(prev, 3);
}

MlpClassifier::MlpClassifier(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("classifier needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in == 0 || l.out == 0 || l.weights.size() != l.in * l.out ||
        l.bias.size() != l.out) {
      throw std::invalid_argument("layer " + std::to_string(i) + " has inconsistent shape");
    }
    if (i > 0 && layers_[i - 1].out != l.in) {
      throw std::invalid_argument("layer " + std::to_string(i) +
                                  " input does not match previous output");
    }
  }
  if (layers_.back().out != 3) {
    throw std::invalid_argument("classifier must end in 3 outputs");
  }
}

std::vector<std::size_t> MlpClassifier::hidden_dims() const {
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) dims.push_back(layers_[i].out);
  return dims;
}

std::size_t MlpClassifier::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

namespace {

void affine(const DenseLayer& l, std::span<const double> x, std::vector<double>& y) {
  y.assign(l.bias.begin(), l.bias.end());
  for (std::size_t r = 0; r < l.out; ++r) {
    double acc = y[r];
    const double* row = &l.weights[r * l.in];
    for (std::size_t c = 0; c < l.in; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void check_input(const MlpClassifier& clf, std::span<const double> features) {
  if (features.size() != clf.input_dim()) {
    throw std::invalid_argument("feature vector has " + std::to_string(features.size()) +
                                " entries, classifier expects " +
                                std::to_string(clf.input_dim()));
  }
}

// Activations of every layer; acts[0] is the input, acts.back() the logits.
std::vector<std::vector<double>> forward_all(const MlpClassifier& clf,
                                             std::span<const double> features) {
  check_input(clf, features);
  const auto& layers = clf.layers();
  std::vector<std::vector<double>> acts(layers.size() + 1);
  acts[0].assign(features.begin(), features.end());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    affine(layers[i], acts[i], acts[i + 1]);
    if (i + 1 < layers.size()) {
      for (double& v : acts[i + 1]) v = std::tanh(v);
    }
  }
  return acts;
}

double log_sum_exp(const std::array<double, 3>& z) {
  const double m = std::max({z[0], z[1], z[2]});
  return m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m) + std::exp(z[2] - m));
}

}  // namespace

std::array<double, 3> MlpClassifier::logits(std::span<const double> features) const {
  const auto acts = forward_all(*this, features);
  return {acts.back()[0], acts.back()[1], acts.back()[2]};
}

Distribution3 MlpClassifier::forward(std::span<const double> features) const {
  return softmax(logits(features));
}

bool MlpClassifier::operator==(const MlpClassifier& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.in != b.in || a.out != b.out || a.weights != b.weights || a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

Distribution3 softmax(const std::array<double, 3>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  Distribution3 p;
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    p[k] = std::exp(logits[k] - m);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

// ---------------------------------------------------------------------------

void FocalLossConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("focal gamma must be >= 0");
  }
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("focal alpha weights must be >= 0");
    }
  }
  if (!(blend >= 0.0 && blend <= 1.0)) {
    throw std::invalid_argument("loss blend must be in [0, 1]");
  }
}

double cross_entropy(const Distribution3& dist, DangerLevel label) {
  const double p = dist[static_cast<int>(label)];
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(p));
}

double focal_loss(const Distribution3& dist, DangerLevel label, const FocalLossConfig& cfg) {
  const int y = static_cast<int>(label);
  const double p = dist[y];
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -cfg.alpha[y] * std::pow(1.0 - p, cfg.gamma) * std::log(p));
}

double blended_loss(const Distribution3& dist, DangerLevel label, const FocalLossConfig& cfg) {
  const double ce = cross_entropy(dist, label);
  const double fl = focal_loss(dist, label, cfg);
  if (cfg.blend == 1.0) return ce;
  if (cfg.blend == 0.0) return fl;
  return cfg.blend * ce + (1.0 - cfg.blend) * fl;
}

namespace {

struct LogitTerms {
  double loss;
  std::array<double, 3> grad;  // d loss / d logits
};

// Blended loss and its logit gradient from the logits directly, so ln p is
// taken as z_y - logsumexp(z) and never underflows.
LogitTerms loss_from_logits(const std::array<double, 3>& z, DangerLevel label,
                            const FocalLossConfig& cfg) {
  const int y = static_cast<int>(label);
  const Distribution3 p = softmax(z);
  const double log_p = z[y] - log_sum_exp(z);
  double one_minus = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (k != y) one_minus += p[k];
  }
  const double py = p[y];
  const double alpha = cfg.alpha[y];
  const double gamma = cfg.gamma;

  const double modulator = std::pow(one_minus, gamma);
  const double ce = -log_p;
  const double fl = -alpha * modulator * log_p;

  // d FL / d z_k = alpha * (gamma (1-p)^(gamma-1) p ln p - (1-p)^gamma) * (delta_ky - p_k)
  double dfl = -modulator;
  if (gamma != 0.0 && one_minus > 0.0) {
    dfl += gamma * std::pow(one_minus, gamma - 1.0) * py * log_p;
  }
  dfl *= alpha;

  LogitTerms t;
  t.loss = cfg.blend * ce + (1.0 - cfg.blend) * fl;
  for (int k = 0; k < 3; ++k) {
    const double delta = (k == y) ? 1.0 : 0.0;
    const double ce_grad = p[k] - delta;
    const double fl_grad = dfl * (delta - p[k]);
    t.grad[k] = cfg.blend * ce_grad + (1.0 - cfg.blend) * fl_grad;
  }
  return t;
}

}  // namespace

LossGradients loss_gradients(const MlpClassifier& clf, std::span<const LabeledExample> batch,
                             const FocalLossConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("loss_gradients: empty batch");
  const auto& layers = clf.layers();
  LossGradients out;
  for (const auto& l : layers) out.grads.emplace_back(l.in, l.out);

  std::vector<double> delta, prev_delta;
  for (const auto& ex : batch) {
    const auto acts = forward_all(clf, ex.features);
    const auto& zl = acts.back();
    const LogitTerms t = loss_from_logits({zl[0], zl[1], zl[2]}, ex.label, cfg);
    out.loss += t.loss;
    delta.assign(t.grad.begin(), t.grad.end());
    for (std::size_t i = layers.size(); i-- > 0;) {
      const auto& l = layers[i];
      auto& g = out.grads[i];
      const auto& input = acts[i];
      for (std::size_t r = 0; r < l.out; ++r) {
        g.bias[r] += delta[r];
        double* grow = &g.weights[r * l.in];
        for (std::size_t c = 0; c < l.in; ++c) grow[c] += delta[r] * input[c];
      }
      if (i == 0) break;
      prev_delta.assign(l.in, 0.0);
      for (std::size_t r = 0; r < l.out; ++r) {
        const double* row = &l.weights[r * l.in];
        for (std::size_t c = 0; c < l.in; ++c) prev_delta[c] += row[c] * delta[r];
      }
      // input is tanh of the previous pre-activation.
      for (std::size_t c = 0; c < l.in; ++c) prev_delta[c] *= 1.0 - input[c] * input[c];
      delta.swap(prev_delta);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  for (auto& g : out.grads) {
    for (double& v : g.weights) v *= inv;
    for (double& v : g.bias) v *= inv;
  }
  return out;
}

double mean_loss(const MlpClassifier& clf, std::span<const LabeledExample> data,
                 const FocalLossConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("mean_loss: empty data");
  double sum = 0.0;
  for (const auto& ex : data) sum += loss_from_logits(clf.logits(ex.features), ex.label, cfg).loss;
  return sum / static_cast<double>(data.size());
}

double accuracy(const MlpClassifier& clf, std::span<const LabeledExample> data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : data) {
    if (classify(clf.forward(ex.features)) == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------

void TrainingConfig::validate() const {
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw std::invalid_argument("hidden layer sizes must be >= 1");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be >= 0");
  }
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  loss.validate();
}

MlpClassifier init_classifier(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                              std::uint64_t seed) {
  MlpClassifier clf(input_dim, hidden_dims);
  Rng rng(seed);
  for (auto& l : clf.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (double& w : l.weights) w = rng.uniform(-limit, limit);
  }
  return clf;
}

TrainingResult train_classifier(std::span<const LabeledExample> data, const TrainingConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw TrainingError(std::string("invalid training config: ") + e.what());
  }
  if (data.empty()) throw TrainingError("training data is empty");
  const std::size_t dim = data.front().features.size();
  if (dim == 0) throw TrainingError("training features are empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].features.size() != dim) {
      throw TrainingError("sample " + std::to_string(i) + " has " +
                          std::to_string(data[i].features.size()) +
                          " features, expected " + std::to_string(dim));
    }
    for (double v : data[i].features) {
      if (!std::isfinite(v)) {
        throw TrainingError("sample " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }

  TrainingResult result{init_classifier(dim, cfg.hidden_dims, cfg.seed), {}, {}};
  // Shuffling draws from a stream separate from initialization.
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledExample> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(data[order[k]]);
      const LossGradients lg = loss_gradients(result.classifier, batch, cfg.loss);
      if (!std::isfinite(lg.loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                            ", batch starting at " + std::to_string(start) +
                            " (learning rate " + format_real(cfg.learning_rate) + ")");
      }
      auto& layers = result.classifier.layers();
      for (std::size_t i = 0; i < layers.size(); ++i) {
        for (std::size_t k = 0; k < layers[i].weights.size(); ++k) {
          layers[i].weights[k] -= cfg.learning_rate * lg.grads[i].weights[k];
        }
        for (std::size_t k = 0; k < layers[i].bias.size(); ++k) {
          layers[i].bias[k] -= cfg.learning_rate * lg.grads[i].bias[k];
        }
      }
    }
    const double loss = mean_loss(result.classifier, data, cfg.loss);
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite training loss after epoch " + std::to_string(epoch + 1));
    }
    result.loss_history.push_back(loss);
    result.accuracy_history.push_back(accuracy(result.classifier, data));
  }
  return result;
}

void write_classifier(std::ostream& out, const MlpClassifier& clf) {
  out << "EADCLF v1 " << clf.input_dim();
  for (std::size_t h : clf.hidden_dims()) out << ' ' << h;
  out << " 3\n";
  for (const auto& l : clf.layers()) {
    for (std::size_t r = 0; r < l.out; ++r) {
      for (std::size_t c = 0; c < l.in; ++c) {
        if (c) out << ' ';
        out << format_real_exact(l.w(r, c));
      }
      out << '\n';
    }
    for (std::size_t r = 0; r < l.out; ++r) {
      if (r) out << ' ';
      out << format_real_exact(l.bias[r]);
    }
    out << '\n';
  }
}

MlpClassifier read_classifier(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty classifier file");
  std::istringstream header(line);
  std::string magic, version;
  header >> magic >> version;
  if (magic != "EADCLF" || version != "v1") {
    throw ParseError(1, "expected 'EADCLF v1' header");
  }
  std::vector<std::size_t> sizes;
  long long s;
  while (header >> s) {
    if (s < 1) throw ParseError(1, "layer sizes must be >= 1");
    sizes.push_back(static_cast<std::size_t>(s));
  }
  if (!header.eof()) throw ParseError(1, "malformed layer size list");
  if (sizes.size() < 2 || sizes.back() != 3) {
    throw ParseError(1, "layer sizes must be '<input_dim> <hidden...> 3'");
  }

  auto read_row = [&](std::size_t expected) {
    std::vector<double> row;
    do {
      if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of file");
      ++lineno;
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    std::istringstream fields(line);
    std::string f;
    while (fields >> f) {
      double v;
      if (!parse_real(f, v) || !std::isfinite(v)) {
        throw ParseError(lineno, "not a finite real: '" + f + "'");
      }
      row.push_back(v);
    }
    if (row.size() != expected) {
      throw ParseError(lineno, "expected " + std::to_string(expected) + " values, found " +
                                   std::to_string(row.size()));
    }
    return row;
  };

  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    DenseLayer l(sizes[i], sizes[i + 1]);
    for (std::size_t r = 0; r < l.out; ++r) {
      const auto row = read_row(l.in);
      std::copy(row.begin(), row.end(), l.weights.begin() + static_cast<std::ptrdiff_t>(r * l.in));
    }
    l.bias = read_row(l.out);
    layers.push_back(std::move(l));
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(lineno, "trailing data after the last layer");
    }
  }
  return MlpClassifier(std::move(layers));
}

// ---------------------------------------------------------------------------

std::string to_string(TriggerRule rule) {
  switch (rule) {
    case TriggerRule::kCurrentHigh: return "current_high";
    case TriggerRule::kMajority: return "majority";
    case TriggerRule::kThresholdScore: return "threshold_score";
  }
  return "unknown";
}

std::optional<TriggerRule> parse_trigger_rule(std::string_view s) {
  if (s == "current_high") return TriggerRule::kCurrentHigh;
  if (s == "majority") return TriggerRule::kMajority;
  if (s == "threshold_score") return TriggerRule::kThresholdScore;
  return std::nullopt;
}

void TriggerPolicyConfig::validate() const {
  if (window < 0) throw std::invalid_argument("trigger window must be >= 0");
  if (min_level == DangerLevel::kA) {
    throw std::invalid_argument("trigger min_level must be B or C");
  }
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw std::invalid_argument("trigger score_threshold must be in [0, 1]");
  }
}

namespace {

void check_window(std::size_t size, const TriggerPolicyConfig& policy) {
  if (size == 0) throw std::invalid_argument("decide_trigger: empty window");
  if (size != static_cast<std::size_t>(policy.window) + 1) {
    throw std::invalid_argument("decide_trigger: window has " + std::to_string(size) +
                                " frames, policy expects " +
                                std::to_string(policy.window + 1));
  }
}

bool decide_levels(std::span<const DangerLevel> levels, std::span<const Distribution3> dists,
                   const TriggerPolicyConfig& policy) {
  const DangerLevel current = levels.back();
  switch (policy.rule) {
    case TriggerRule::kCurrentHigh:
      return current >= policy.min_level;
    case TriggerRule::kMajority: {
      if (current == DangerLevel::kC) return true;
      if (current < DangerLevel::kB) return false;
      const auto elevated = std::count_if(levels.begin(), levels.end(),
                                          [](DangerLevel l) { return l >= DangerLevel::kB; });
      return 2 * static_cast<std::size_t>(elevated) > levels.size();
    }
    case TriggerRule::kThresholdScore: {
      if (current < DangerLevel::kB) return false;
      double sum = 0.0;
      for (const auto& d : dists) sum += (d[1] + 2.0 * d[2]) / 2.0;
      return sum / static_cast<double>(dists.size()) >= policy.score_threshold;
    }
  }
  return false;
}

}  // namespace

bool decide_trigger(std::span<const DangerLevel> window, const TriggerPolicyConfig& policy) {
  check_window(window.size(), policy);
  std::vector<Distribution3> dists;
  dists.reserve(window.size());
  for (DangerLevel l : window) dists.push_back(one_hot(l));
  return decide_levels(window, dists, policy);
}

bool decide_trigger(std::span<const Distribution3> window, const TriggerPolicyConfig& policy) {
  check_window(window.size(), policy);
  std::vector<DangerLevel> levels;
  levels.reserve(window.size());
  for (const auto& d : window) levels.push_back(classify(d));
  return decide_levels(levels, window, policy);
}

std::vector<TriggerDecision> simulate_stream(std::span<const FrameRecord> frames,
                                             const FrameScorer* scorer,
                                             const TriggerPolicyConfig& policy) {
  policy.validate();
  std::vector<Distribution3> dists;
  dists.reserve(frames.size());
  std::vector<std::string> unusable;
  for (const auto& f : frames) {
    if (scorer && f.features) {
      dists.push_back(scorer->score(*f.features));
    } else if (f.score_distribution) {
      const auto& d = *f.score_distribution;
      const double sum = d[0] + d[1] + d[2];
      if (d[0] < 0 || d[1] < 0 || d[2] < 0 || std::abs(sum - 1.0) > 1e-6) {
        throw std::invalid_argument("frame '" + f.frame_id +
                                    "' has an invalid score distribution");
      }
      dists.push_back(d);
    } else if (f.predicted_level) {
      dists.push_back(one_hot(*f.predicted_level));
    } else {
      unusable.push_back(f.frame_id);
      dists.push_back(one_hot(DangerLevel::kA));
    }
  }
  if (!unusable.empty()) {
    std::string names;
    for (const auto& id : unusable) names += (names.empty() ? "" : ", ") + id;
    throw std::invalid_argument("frames lack both features (with a classifier) and "
                                "danger_pred: " + names);
  }

  const std::size_t width = static_cast<std::size_t>(policy.window) + 1;
  std::deque<Distribution3> window(width, one_hot(DangerLevel::kA));
  std::vector<Distribution3> buf(width);
  std::vector<TriggerDecision> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    window.pop_front();
    window.push_back(dists[i]);
    std::copy(window.begin(), window.end(), buf.begin());
    out.push_back({frames[i].frame_id, classify(dists[i]),
                   decide_trigger(std::span<const Distribution3>(buf), policy)});
  }
  return out;
}

}  // namespace walkguard
