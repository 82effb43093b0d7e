#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psmaudit/corpus.hpp"
#include "psmaudit/model.hpp"

namespace psmaudit {

struct LabeledSample {
  std::string password;
  double prob = 0.0;
  std::vector<double> internal_probs;
  bool member = false;
};

// Queries the shadow model on every unique password of both halves and sorts
// by probability (descending, ties lexicographic). Throws ProvenanceError if
// the shadow model was not trained on split.train_half.
std::vector<LabeledSample> build_labeled(const PasswordModel& shadow,
                                         const SplitPair& split);

struct ThresholdAttack {
  double delta = 0.0;
  double expected_member_ratio = 0.8;
  std::size_t prefix_length = 0;   // samples in the chosen prefix
  double achieved_ratio = 0.0;     // member fraction of that prefix
  bool qualified = true;           // false: no prefix reached the ratio
  std::uint64_t shadow_fingerprint = 0;

  // Member iff prob >= delta and prob > 0. A zero-probability password is
  // outside the model's candidate space, so delta = 0 means "prob > 0".
  bool is_member(double prob) const { return prob > 0.0 && prob >= delta; }
};

// Longest prefix of the sorted list whose member fraction is >= ratio; delta
// is the probability of its last sample. With no qualifying prefix, delta is
// the first sample's probability and qualified is false. Throws
// ArgumentError for an empty list or ratio outside (0.5, 1].
ThresholdAttack select_threshold(const std::vector<LabeledSample>& labeled,
                                 double ratio);

struct Prediction {
  std::string password;
  double prob = 0.0;
  bool member = false;
};

// One prediction per unique query password, in corpus (lexicographic) order.
std::vector<Prediction> attack_threshold(const PasswordModel& target,
                                         const PasswordCorpus& queries,
                                         double delta, unsigned threads = 1);

// Top ceil(k% * n) queries by target probability are members; ties go to the
// lexicographically smaller password. Output in corpus order. Throws
// ArgumentError for empty queries or k outside (0, 100).
std::vector<Prediction> attack_salem(const PasswordModel& target,
                                     const PasswordCorpus& queries,
                                     double k_percent = 10.0,
                                     unsigned threads = 1);

struct AttackReport {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // tp + fp == 0
  bool recall_undefined = false;     // tp + fn == 0
};

AttackReport evaluate(const std::vector<bool>& predicted,
                      const std::vector<bool>& truth);
// Ground truth: prediction.password is in truth (the target training set).
AttackReport evaluate(const std::vector<Prediction>& predictions,
                      const PasswordCorpus& truth);

enum class FeatureScheme { WholeProb, InternalStats, Joint };
std::string_view to_string(FeatureScheme scheme);
FeatureScheme parse_feature_scheme(std::string_view name);

std::size_t feature_length(FeatureScheme scheme);

struct FeatureVector {
  std::vector<double> values;
  bool empty_internal = false;  // internal stats zero-filled
};

// WholeProb: [log prob]. InternalStats: [min, max, mean of internal log-probs,
// geometric mean of internal probs, token count]. Joint: both. Logs of zero
// are clamped to log(1e-300).
FeatureVector featurize(const LabeledSample& sample, FeatureScheme scheme);

struct ClassifierOptions {
  std::size_t epochs = 2000;
  double learning_rate = 0.5;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  // After descent, move the bias to the cut of w.x with the best training
  // accuracy.
  bool refit_bias = true;
};

// Logistic regression over standardized features, full-batch gradient
// descent.
class ClassifierAttack {
 public:
  ClassifierAttack() = default;
  ClassifierAttack(FeatureScheme scheme, std::vector<double> weights,
                   double bias, std::vector<double> mean,
                   std::vector<double> scale);

  double score(const LabeledSample& sample) const;  // P(member)
  bool is_member(const LabeledSample& sample) const {
    return score(sample) >= 0.5;
  }

  FeatureScheme scheme() const { return scheme_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double training_accuracy() const { return training_accuracy_; }
  std::size_t training_size() const { return training_size_; }

 private:
  friend ClassifierAttack train_classifier(const std::vector<LabeledSample>&,
                                           FeatureScheme,
                                           const ClassifierOptions&);
  FeatureScheme scheme_ = FeatureScheme::Joint;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> scale_;
  double training_accuracy_ = 0.0;
  std::size_t training_size_ = 0;
};

// Throws ArgumentError unless both classes are present.
ClassifierAttack train_classifier(const std::vector<LabeledSample>& samples,
                                  FeatureScheme scheme,
                                  const ClassifierOptions& options = {});

// Builds a LabeledSample for a target query (member flag from truth, if any).
LabeledSample label_query(const PasswordModel& model, const std::string& pw,
                          bool member = false);

std::string labeled_csv(const std::vector<LabeledSample>& labeled);

}  // namespace psmaudit
