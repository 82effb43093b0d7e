#include "psmaudit/strength.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "format.hpp"
#include "psmaudit/error.hpp"

namespace psmaudit {

MonteCarloEstimator::MonteCarloEstimator(std::vector<double> log_probs,
                                         double acceptance,
                                         std::uint64_t model_fingerprint)
    : log_probs_(std::move(log_probs)),
      acceptance_(acceptance),
      fingerprint_(model_fingerprint) {
  std::sort(log_probs_.begin(), log_probs_.end(), std::greater<>());
  cumulative_.reserve(log_probs_.size());
  const double n = static_cast<double>(log_probs_.size());
  double acc = 0.0;
  for (double lp : log_probs_) {
    acc += acceptance_ / (n * std::exp(lp));
    cumulative_.push_back(acc);
  }
}

double MonteCarloEstimator::guess_number(double p) const {
  if (!(p > 0.0)) return kInfiniteGuessNumber;
  const double lp = std::log(p);
  // log_probs_ is descending: count the prefix strictly above lp.
  auto it = std::partition_point(log_probs_.begin(), log_probs_.end(),
                                 [lp](double x) { return x > lp; });
  auto k = static_cast<std::size_t>(it - log_probs_.begin());
  return 1.0 + (k == 0 ? 0.0 : cumulative_[k - 1]);
}

MonteCarloEstimator build_estimator(const PasswordModel& model,
                                    std::size_t sample_size,
                                    std::uint64_t seed) {
  if (sample_size < kMinEstimatorSamples)
    throw ArgumentError("estimator needs at least " +
                        std::to_string(kMinEstimatorSamples) + " samples");
  Rng rng(derive_seed(seed, "monte-carlo"));
  std::vector<double> log_probs;
  log_probs.reserve(sample_size);
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 1000 * static_cast<std::uint64_t>(sample_size);
  while (log_probs.size() < sample_size) {
    if (++attempts > max_attempts)
      throw UnsupportedError("model rejects nearly every sample draw");
    auto s = model.sample(rng);
    if (!s || !(s->prob > 0.0)) continue;
    log_probs.push_back(std::log(s->prob));
  }
  double acceptance = static_cast<double>(sample_size) / static_cast<double>(attempts);
  return MonteCarloEstimator(std::move(log_probs), acceptance,
                             model_fingerprint(model));
}

std::uint64_t model_fingerprint(const PasswordModel& model) {
  Fnv1a h;
  h.update(serialize_model(model));
  return h.digest();
}

std::string_view to_string(StrengthBucket bucket) {
  switch (bucket) {
    case StrengthBucket::Weak: return "weak";
    case StrengthBucket::Medium: return "medium";
    case StrengthBucket::Strong: return "strong";
  }
  return "unknown";
}

StrengthRating rate(double guess_number, const StrengthThresholds& t) {
  if (!(t.weak_below <= t.strong_from))
    throw ArgumentError("strength thresholds out of order");
  StrengthRating r{guess_number, StrengthBucket::Medium, t};
  if (guess_number < t.weak_below)
    r.bucket = StrengthBucket::Weak;
  else if (guess_number >= t.strong_from)
    r.bucket = StrengthBucket::Strong;
  return r;
}

double weighted_spearman(const std::vector<std::string>& meter_order,
                         const std::vector<std::string>& reference_order) {
  const std::size_t n = reference_order.size();
  if (n < 2) throw ArgumentError("weighted spearman needs at least 2 items");
  if (meter_order.size() != n)
    throw ArgumentError("rankings list different password sets");
  std::unordered_map<std::string_view, std::size_t> meter_rank;
  meter_rank.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!meter_rank.emplace(meter_order[i], i + 1).second)
      throw ArgumentError("duplicate password in meter ranking");

  std::vector<double> x(n), y(n), w(n);
  std::unordered_map<std::string_view, bool> seen;
  seen.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = meter_rank.find(reference_order[i]);
    if (it == meter_rank.end())
      throw ArgumentError("rankings list different password sets");
    if (!seen.emplace(reference_order[i], true).second)
      throw ArgumentError("duplicate password in reference ranking");
    x[i] = static_cast<double>(i + 1);
    y[i] = static_cast<double>(it->second);
    w[i] = 1.0 / x[i];
  }

  double sw = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    mx += w[i] * x[i];
    my += w[i] * y[i];
  }
  mx /= sw;
  my /= sw;
  double cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    cxy += w[i] * dx * dy;
    cxx += w[i] * dx * dx;
    cyy += w[i] * dy * dy;
  }
  double r = cxy / std::sqrt(cxx * cyy);
  return std::clamp(r, -1.0, 1.0);
}

FitReport fit_g(const PasswordModel& model, const PasswordCorpus& train_corpus,
                const std::vector<std::uint64_t>& g_list) {
  if (g_list.empty()) throw ArgumentError("fit_g needs at least one G");
  std::uint64_t max_g = 0;
  for (auto g : g_list) {
    if (g == 0) throw ArgumentError("G must be positive");
    max_g = std::max(max_g, g);
  }
  auto top = enumerate_top(model, static_cast<std::size_t>(max_g));
  // prefix[i] = members among the first i candidates
  std::vector<std::uint64_t> prefix(top.size() + 1, 0);
  for (std::size_t i = 0; i < top.size(); ++i)
    prefix[i + 1] = prefix[i] + (train_corpus.contains(top[i].password) ? 1 : 0);

  FitReport report;
  for (auto g : g_list) {
    FitPoint pt;
    pt.g = g;
    pt.emitted = std::min<std::uint64_t>(g, top.size());
    pt.members = prefix[pt.emitted];
    pt.exhausted = pt.emitted < g;
    pt.fit = pt.emitted == 0 ? 0.0
                             : static_cast<double>(pt.members) /
                                   static_cast<double>(pt.emitted);
    report.points.push_back(pt);
  }
  return report;
}

std::vector<ScatterRow> scatter_data(const PasswordModel& model,
                                     const MonteCarloEstimator& estimator,
                                     const PasswordCorpus& member_set,
                                     const std::vector<std::string>& probes,
                                     double guess_cap) {
  std::vector<ScatterRow> rows;
  rows.reserve(probes.size());
  for (const auto& pw : probes) {
    double g = estimator.guess_number(model.prob(pw));
    if (g <= guess_cap) rows.push_back({g, member_set.contains(pw)});
  }
  return rows;
}

std::string fit_report_csv(const FitReport& report) {
  std::string out = "G,fit\n";
  for (const auto& p : report.points) {
    out += std::to_string(p.g);
    out += ',';
    out += format_double(p.fit);
    out += '\n';
  }
  return out;
}

std::string scatter_csv(const std::vector<ScatterRow>& rows) {
  std::string out = "guess_number,is_member\n";
  for (const auto& r : rows) {
    out += format_double(r.guess_number);
    out += r.is_member ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace psmaudit
