#include "psmaudit/mia.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "format.hpp"
#include "psmaudit/error.hpp"
#include "psmaudit/parallel.hpp"
#include "psmaudit/rng.hpp"

namespace psmaudit {

namespace {

constexpr double kMinLog = -690.7755278982137;  // log(1e-300)

double clamped_log(double p) {
  return p > 1e-300 ? std::log(p) : kMinLog;
}

bool prob_then_lex(const LabeledSample& a, const LabeledSample& b) {
  if (a.prob != b.prob) return a.prob > b.prob;
  return a.password < b.password;
}

std::vector<double> query_probs(const PasswordModel& target,
                                const PasswordCorpus& queries,
                                unsigned threads) {
  const auto& entries = queries.entries();
  std::vector<double> probs(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    probs[i] = target.prob(entries[i].password);
  });
  return probs;
}

}  // namespace

LabeledSample label_query(const PasswordModel& model, const std::string& pw,
                          bool member) {
  return {pw, model.prob(pw), model.token_probs(pw), member};
}

std::vector<LabeledSample> build_labeled(const PasswordModel& shadow,
                                         const SplitPair& split) {
  if (shadow.info().corpus_fingerprint != split.train_half.fingerprint())
    throw ProvenanceError("shadow model was not trained on this split's train half");
  std::vector<LabeledSample> out;
  out.reserve(split.train_half.unique_size() + split.test_half.unique_size());
  for (const auto& e : split.train_half.entries())
    out.push_back(label_query(shadow, e.password, true));
  for (const auto& e : split.test_half.entries())
    out.push_back(label_query(shadow, e.password, false));
  std::sort(out.begin(), out.end(), prob_then_lex);
  return out;
}

ThresholdAttack select_threshold(const std::vector<LabeledSample>& labeled,
                                 double ratio) {
  if (labeled.empty()) throw ArgumentError("no labeled samples");
  if (!(ratio > 0.5 && ratio <= 1.0))
    throw ArgumentError("expected member ratio must be in (0.5, 1]");
  ThresholdAttack a;
  a.expected_member_ratio = ratio;
  std::size_t members = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (labeled[i].member) ++members;
    const double len = static_cast<double>(i + 1);
    if (static_cast<double>(members) / len >= ratio) {
      a.prefix_length = i + 1;
      a.achieved_ratio = static_cast<double>(members) / len;
    }
  }
  if (a.prefix_length == 0) {
    a.qualified = false;
    a.prefix_length = 1;
    a.achieved_ratio = labeled.front().member ? 1.0 : 0.0;
  }
  a.delta = labeled[a.prefix_length - 1].prob;
  return a;
}

std::vector<Prediction> attack_threshold(const PasswordModel& target,
                                         const PasswordCorpus& queries,
                                         double delta, unsigned threads) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw ArgumentError("delta must be in [0, 1]");
  ThresholdAttack rule;
  rule.delta = delta;
  auto probs = query_probs(target, queries, threads);
  std::vector<Prediction> out;
  out.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    out.push_back({queries.entries()[i].password, probs[i], rule.is_member(probs[i])});
  return out;
}

std::vector<Prediction> attack_salem(const PasswordModel& target,
                                     const PasswordCorpus& queries,
                                     double k_percent, unsigned threads) {
  if (queries.empty()) throw ArgumentError("no queries");
  if (!(k_percent > 0.0 && k_percent < 100.0))
    throw ArgumentError("k_percent must be in (0, 100)");
  auto probs = query_probs(target, queries, threads);
  const std::size_t n = probs.size();
  // Epsilon keeps 10% of 10 at exactly 1 despite binary rounding.
  auto m = static_cast<std::size_t>(
      std::ceil(k_percent / 100.0 * static_cast<double>(n) - 1e-9));
  m = std::clamp<std::size_t>(m, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Entries are already lexicographic, so index order breaks ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<Prediction> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {queries.entries()[i].password, probs[i], false};
  for (std::size_t r = 0; r < m; ++r) out[order[r]].member = true;
  return out;
}

AttackReport evaluate(const std::vector<bool>& predicted,
                      const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw ArgumentError("prediction and truth lengths differ");
  AttackReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i])
      (truth[i] ? r.tp : r.fp)++;
    else
      (truth[i] ? r.fn : r.tn)++;
  }
  const auto tp = static_cast<double>(r.tp);
  r.precision_undefined = r.tp + r.fp == 0;
  r.recall_undefined = r.tp + r.fn == 0;
  r.precision = r.precision_undefined ? 0.0 : tp / static_cast<double>(r.tp + r.fp);
  r.recall = r.recall_undefined ? 0.0 : tp / static_cast<double>(r.tp + r.fn);
  const std::uint64_t denom = 2 * r.tp + r.fp + r.fn;
  r.f1 = denom == 0 ? 0.0 : 2.0 * tp / static_cast<double>(denom);
  return r;
}

AttackReport evaluate(const std::vector<Prediction>& predictions,
                      const PasswordCorpus& truth) {
  std::vector<bool> pred, actual;
  pred.reserve(predictions.size());
  actual.reserve(predictions.size());
  for (const auto& p : predictions) {
    pred.push_back(p.member);
    actual.push_back(truth.contains(p.password));
  }
  return evaluate(pred, actual);
}

std::string_view to_string(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::WholeProb: return "whole";
    case FeatureScheme::InternalStats: return "internal";
    case FeatureScheme::Joint: return "joint";
  }
  return "unknown";
}

FeatureScheme parse_feature_scheme(std::string_view name) {
  for (auto s : {FeatureScheme::WholeProb, FeatureScheme::InternalStats,
                 FeatureScheme::Joint})
    if (name == to_string(s)) return s;
  throw ArgumentError("unknown feature scheme: " + std::string(name));
}

std::size_t feature_length(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::WholeProb: return 1;
    case FeatureScheme::InternalStats: return 5;
    case FeatureScheme::Joint: return 6;
  }
  return 0;
}

FeatureVector featurize(const LabeledSample& sample, FeatureScheme scheme) {
  FeatureVector f;
  f.values.reserve(feature_length(scheme));
  if (scheme != FeatureScheme::InternalStats)
    f.values.push_back(clamped_log(sample.prob));
  if (scheme != FeatureScheme::WholeProb) {
    const auto& ip = sample.internal_probs;
    if (ip.empty()) {
      f.empty_internal = true;
      f.values.insert(f.values.end(), 5, 0.0);
    } else {
      double lo = clamped_log(ip.front()), hi = lo, sum = 0.0;
      for (double p : ip) {
        double l = clamped_log(p);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
        sum += l;
      }
      const double mean = sum / static_cast<double>(ip.size());
      f.values.push_back(lo);
      f.values.push_back(hi);
      f.values.push_back(mean);
      f.values.push_back(std::exp(mean));
      f.values.push_back(static_cast<double>(ip.size()));
    }
  }
  return f;
}

ClassifierAttack::ClassifierAttack(FeatureScheme scheme,
                                   std::vector<double> weights, double bias,
                                   std::vector<double> mean,
                                   std::vector<double> scale)
    : scheme_(scheme),
      weights_(std::move(weights)),
      bias_(bias),
      mean_(std::move(mean)),
      scale_(std::move(scale)) {
  if (weights_.size() != feature_length(scheme_) || mean_.size() != weights_.size() ||
      scale_.size() != weights_.size())
    throw ArgumentError("classifier weights do not match the feature scheme");
}

double ClassifierAttack::score(const LabeledSample& sample) const {
  auto f = featurize(sample, scheme_);
  double z = bias_;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    z += weights_[i] * (f.values[i] - mean_[i]) / scale_[i];
  return 1.0 / (1.0 + std::exp(-z));
}

ClassifierAttack train_classifier(const std::vector<LabeledSample>& samples,
                                  FeatureScheme scheme,
                                  const ClassifierOptions& options) {
  std::size_t positives = 0;
  for (const auto& s : samples) positives += s.member ? 1 : 0;
  if (positives == 0 || positives == samples.size())
    throw ArgumentError("classifier training needs both members and non-members");

  const std::size_t d = feature_length(scheme);
  const std::size_t n = samples.size();
  std::vector<std::vector<double>> x;
  x.reserve(n);
  for (const auto& s : samples) x.push_back(featurize(s, scheme).values);

  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  for (auto& m : mean) m /= static_cast<double>(n);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 1e-12)) s = 1.0;
  }
  for (auto& row : x)
    for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - mean[j]) / scale[j];

  Rng rng(derive_seed(options.seed, "classifier-init"));
  std::vector<double> w(d);
  for (auto& v : w) v = (rng.uniform() - 0.5) * 0.02;
  double b = 0.0;

  std::vector<double> grad(d);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
      const double err = 1.0 / (1.0 + std::exp(-z)) - (samples[i].member ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * x[i][j];
      gb += err;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j)
      w[j] -= options.learning_rate * (grad[j] * inv + options.l2 * w[j]);
    b -= options.learning_rate * gb * inv;
  }

  if (options.refit_bias) {
    // Gradient descent approaches the max-margin boundary very slowly on
    // separable data, so the bias is re-picked by an exact scan over cuts
    // of w.x; it only moves when that strictly improves training accuracy.
    std::vector<std::pair<double, bool>> m(n);
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
      m[i] = {z, samples[i].member};
    }
    std::sort(m.begin(), m.end());
    auto correct_at = [&](double bias) {
      std::size_t c = 0;
      for (const auto& [z, member] : m) c += ((z + bias) >= 0.0) == member ? 1 : 0;
      return c;
    };
    std::size_t best = correct_at(b);
    // Cut below index k: members are m[k..n). Accuracy = negatives below + positives above.
    std::size_t neg_below = 0, pos_above = positives;
    for (std::size_t k = 0; k <= n; ++k) {
      if (k > 0) {
        if (m[k - 1].second) --pos_above;
        else ++neg_below;
      }
      if (k > 0 && k < n && m[k].first == m[k - 1].first) continue;
      const std::size_t c = neg_below + pos_above;
      if (c <= best) continue;
      double cut;
      if (k == 0) cut = m[0].first - 1.0;
      else if (k == n) cut = m[n - 1].first + 1.0;
      else cut = 0.5 * (m[k - 1].first + m[k].first);
      if (correct_at(-cut) != c) continue;  // midpoint rounding onto a sample
      best = c;
      b = -cut;
    }
  }

  ClassifierAttack attack(scheme, std::move(w), b, std::move(mean), std::move(scale));
  std::size_t correct = 0;
  for (const auto& s : samples) correct += attack.is_member(s) == s.member ? 1 : 0;
  attack.training_accuracy_ = static_cast<double>(correct) / static_cast<double>(n);
  attack.training_size_ = n;
  return attack;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string labeled_csv(const std::vector<LabeledSample>& labeled) {
  std::string out = "password,prob,member,internal_probs\n";
  for (const auto& s : labeled) {
    out += csv_field(s.password);
    out += ',';
    out += format_double(s.prob);
    out += s.member ? ",1," : ",0,";
    for (std::size_t i = 0; i < s.internal_probs.size(); ++i) {
      if (i) out += ';';
      out += format_double(s.internal_probs[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace psmaudit
