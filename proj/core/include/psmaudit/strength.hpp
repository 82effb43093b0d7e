#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "psmaudit/corpus.hpp"
#include "psmaudit/model.hpp"

namespace psmaudit {

inline constexpr double kInfiniteGuessNumber =
    std::numeric_limits<double>::infinity();

// Monte Carlo guess-number estimator. Holds N sampled log-probabilities in
// descending order and the running sum of their importance weights.
class MonteCarloEstimator {
 public:
  MonteCarloEstimator() = default;
  // log_probs need not be sorted. acceptance is the fraction of sampling
  // attempts that produced a sample (1 for every kind except chunk PCFG).
  MonteCarloEstimator(std::vector<double> log_probs, double acceptance,
                      std::uint64_t model_fingerprint);

  // 1 + sum over samples with prob > p of acceptance / (N * p_sample).
  // p <= 0 gives kInfiniteGuessNumber.
  double guess_number(double p) const;

  std::size_t sample_size() const { return log_probs_.size(); }
  double acceptance() const { return acceptance_; }
  std::uint64_t model_fingerprint() const { return fingerprint_; }
  const std::vector<double>& log_probs() const { return log_probs_; }

  friend bool operator==(const MonteCarloEstimator&,
                         const MonteCarloEstimator&) = default;

 private:
  std::vector<double> log_probs_;   // descending
  std::vector<double> cumulative_;  // cumulative_[i] = weight of first i+1
  double acceptance_ = 1.0;
  std::uint64_t fingerprint_ = 0;
};

inline constexpr std::size_t kMinEstimatorSamples = 1000;

// Draws sample_size passwords by ancestral sampling. Throws ArgumentError
// when sample_size < kMinEstimatorSamples, UnsupportedError when the model
// rejects nearly every draw.
MonteCarloEstimator build_estimator(const PasswordModel& model,
                                    std::size_t sample_size,
                                    std::uint64_t seed);

// Fingerprint of a trained model: metadata plus the serialized payload.
std::uint64_t model_fingerprint(const PasswordModel& model);

enum class StrengthBucket { Weak, Medium, Strong };
std::string_view to_string(StrengthBucket bucket);

struct StrengthThresholds {
  double weak_below = 1e6;     // guess_number < weak_below -> Weak
  double strong_from = 1e14;   // guess_number >= strong_from -> Strong
};

struct StrengthRating {
  double guess_number = 0.0;
  StrengthBucket bucket = StrengthBucket::Weak;
  StrengthThresholds thresholds;
};

StrengthRating rate(double guess_number, const StrengthThresholds& t = {});

// Weighted Pearson correlation of rank vectors. Item i gets weight
// 1 / reference_rank(i), so agreement at the head of the reference ordering
// dominates. Both inputs list the same passwords, index 0 = rank 1. Throws
// ArgumentError for mismatched sets, duplicates, or fewer than two items.
double weighted_spearman(const std::vector<std::string>& meter_order,
                         const std::vector<std::string>& reference_order);

struct FitPoint {
  std::uint64_t g = 0;
  double fit = 0.0;            // members among emitted / emitted
  std::uint64_t members = 0;
  std::uint64_t emitted = 0;   // < g when the support ran out
  bool exhausted = false;
};

struct FitReport {
  std::vector<FitPoint> points;
};

// Enumerates max(g_list) candidates once and reports, per G, the fraction of
// the top G that occur in the training corpus.
FitReport fit_g(const PasswordModel& model, const PasswordCorpus& train_corpus,
                const std::vector<std::uint64_t>& g_list);

struct ScatterRow {
  double guess_number = 0.0;
  bool is_member = false;
};

// One row per probe whose guess number is <= guess_cap, in probe order.
std::vector<ScatterRow> scatter_data(const PasswordModel& model,
                                     const MonteCarloEstimator& estimator,
                                     const PasswordCorpus& member_set,
                                     const std::vector<std::string>& probes,
                                     double guess_cap = kInfiniteGuessNumber);

std::string fit_report_csv(const FitReport& report);
std::string scatter_csv(const std::vector<ScatterRow>& rows);

}  // namespace psmaudit
