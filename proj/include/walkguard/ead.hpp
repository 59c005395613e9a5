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

// Environment awareness discriminator: per-frame danger classification and
// the windowed policy deciding when a reminder fires.

#ifndef WALKGUARD_EAD_HPP_
#define WALKGUARD_EAD_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace walkguard {

// A (low) < B (medium) < C (high).
enum class DangerLevel : int { kA = 0, kB = 1, kC = 2 };

inline constexpr int kNumDangerLevels = 3;

char to_char(DangerLevel level);
std::string to_string(DangerLevel level);
// Accepts "A", "B", "C". Returns nullopt otherwise.
std::optional<DangerLevel> parse_danger_level(std::string_view s);

using Distribution3 = std::array<double, 3>;

Distribution3 one_hot(DangerLevel level);

// argmax; ties resolve toward the higher danger level.
DangerLevel classify(const Distribution3& dist);

struct FrameRecord {
  std::string frame_id;
  std::optional<std::vector<double>> features;
  std::optional<DangerLevel> true_level;
  std::optional<DangerLevel> predicted_level;
  std::optional<Distribution3> score_distribution;
};

// Maps a feature vector to a danger distribution.
class FrameScorer {
 public:
  virtual ~FrameScorer() = default;
  virtual Distribution3 score(std::span<const double> features) const = 0;
};

// ---------------------------------------------------------------------------
// Classifier

// y = W x + b, W stored row-major as out x in.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
};

// Feed-forward net: tanh hidden layers, 3 softmax outputs.
class MlpClassifier final : public FrameScorer {
 public:
  // All parameters zero.
  MlpClassifier(std::size_t input_dim, std::vector<std::size_t> hidden_dims);
  // Throws std::invalid_argument if the layers do not chain into 3 outputs.
  explicit MlpClassifier(std::vector<DenseLayer> layers);

  std::size_t input_dim() const { return layers_.front().in; }
  std::vector<std::size_t> hidden_dims() const;
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Pre-softmax outputs. Throws std::invalid_argument on a dimension mismatch.
  std::array<double, 3> logits(std::span<const double> features) const;
  Distribution3 forward(std::span<const double> features) const;
  Distribution3 score(std::span<const double> features) const override {
    return forward(features);
  }

  bool operator==(const MlpClassifier& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

// Numerically stable softmax.
Distribution3 softmax(const std::array<double, 3>& logits);

// ---------------------------------------------------------------------------
// Losses (natural log)

struct FocalLossConfig {
  double gamma = 2.0;
  // Per-class weights for A, B, C.
  std::array<double, 3> alpha = {0.25, 0.5, 1.0};
  // Mix: blend * cross_entropy + (1 - blend) * focal.
  double blend = 0.5;

  void validate() const;

  bool operator==(const FocalLossConfig&) const = default;
};

// -ln p(label); +inf when p(label) = 0.
double cross_entropy(const Distribution3& dist, DangerLevel label);
// -alpha[label] (1 - p)^gamma ln p; +inf when p(label) = 0.
double focal_loss(const Distribution3& dist, DangerLevel label,
                  const FocalLossConfig& cfg);
double blended_loss(const Distribution3& dist, DangerLevel label,
                    const FocalLossConfig& cfg);

struct LabeledExample {
  std::vector<double> features;
  DangerLevel label = DangerLevel::kA;
};

struct LossGradients {
  double loss = 0.0;
  // Same shapes as the classifier's layers.
  std::vector<DenseLayer> grads;
};

// Mean blended loss over the batch and its analytic gradient. Throws
// std::invalid_argument on an empty batch or dimension mismatch.
LossGradients loss_gradients(const MlpClassifier& clf,
                             std::span<const LabeledExample> batch,
                             const FocalLossConfig& cfg);

// Mean blended loss only.
double mean_loss(const MlpClassifier& clf, std::span<const LabeledExample> data,
                 const FocalLossConfig& cfg);

double accuracy(const MlpClassifier& clf, std::span<const LabeledExample> data);

// ---------------------------------------------------------------------------
// Training

struct TrainingConfig {
  std::vector<std::size_t> hidden_dims = {8};
  double learning_rate = 0.5;
  int epochs = 4;
  std::size_t batch_size = 10;
  std::uint64_t seed = 42;
  FocalLossConfig loss;

  void validate() const;

  bool operator==(const TrainingConfig&) const = default;
};

struct TrainingResult {
  MlpClassifier classifier;
  // Mean training loss after each epoch.
  std::vector<double> loss_history;
  std::vector<double> accuracy_history;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Xavier-uniform initialization drawn from `seed`.
MlpClassifier init_classifier(std::size_t input_dim,
                              const std::vector<std::size_t>& hidden_dims,
                              std::uint64_t seed);

// Mini-batch gradient descent, fixed learning rate, seeded shuffling.
// Identical inputs give bitwise-identical results. Throws TrainingError on
// empty or inconsistent data, or a non-finite loss.
TrainingResult train_classifier(std::span<const LabeledExample> data,
                                const TrainingConfig& cfg);

// "EADCLF v1 <input_dim> <hidden...> 3" header, then per layer the weight
// rows (one line each) and a bias line.
void write_classifier(std::ostream& out, const MlpClassifier& clf);
// Throws ParseError.
MlpClassifier read_classifier(std::istream& in);

// ---------------------------------------------------------------------------
// Trigger policy

enum class TriggerRule { kCurrentHigh, kMajority, kThresholdScore };

std::string to_string(TriggerRule rule);
std::optional<TriggerRule> parse_trigger_rule(std::string_view s);

struct TriggerPolicyConfig {
  // Number of history frames; the window holds window + 1 frames.
  int window = 3;
  TriggerRule rule = TriggerRule::kMajority;
  // current_high: fire iff the current level is at least this.
  DangerLevel min_level = DangerLevel::kC;
  // threshold_score: fire iff current >= B and the window mean of the
  // normalized expected level (0*pA + 1*pB + 2*pC) / 2 is >= this.
  double score_threshold = 0.5;

  void validate() const;

  bool operator==(const TriggerPolicyConfig&) const = default;
};

// Window is oldest first, current last, length window + 1. Rules:
//   current_high:    current >= min_level
//   majority:        current == C, or current >= B and more than half of the
//                    window is >= B
//   threshold_score: see TriggerPolicyConfig
// Throws std::invalid_argument on an empty or wrongly sized window.
bool decide_trigger(std::span<const DangerLevel> window,
                    const TriggerPolicyConfig& policy);
bool decide_trigger(std::span<const Distribution3> window,
                    const TriggerPolicyConfig& policy);

struct TriggerDecision {
  std::string frame_id;
  DangerLevel level = DangerLevel::kA;
  bool trigger = false;
};

// Classifies each frame (scorer on features if both are available, else the
// frame's score_distribution, else its predicted_level) and applies the
// policy over a window padded with A at stream start.
std::vector<TriggerDecision> simulate_stream(std::span<const FrameRecord> frames,
                                             const FrameScorer* scorer,
                                             const TriggerPolicyConfig& policy);

}  // namespace walkguard

#endif  // WALKGUARD_EAD_HPP_
