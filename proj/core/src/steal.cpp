#include "psmaudit/steal.hpp"

#include <algorithm>
#include <cctype>

#include "psmaudit/error.hpp"
#include "psmaudit/strength.hpp"

namespace psmaudit {

namespace {

constexpr std::pair<char, char> kLeet[] = {
    {'a', '@'}, {'e', '3'}, {'i', '1'}, {'o', '0'}, {'s', '$'}, {'t', '7'}};

char leet_of(char c) {
  for (auto [plain, sub] : kLeet)
    if (c == plain) return sub;
  return 0;
}

char unleet_of(char c) {
  for (auto [plain, sub] : kLeet)
    if (c == sub) return plain;
  return 0;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::size_t trailing_digits(const std::string& s) {
  std::size_t n = 0;
  while (n < s.size() && is_digit(s[s.size() - 1 - n])) ++n;
  return n;
}

std::size_t leading_digits(const std::string& s) {
  std::size_t n = 0;
  while (n < s.size() && is_digit(s[n])) ++n;
  return n;
}

// "pass09" -> "pass10", "a99" -> "a100".
std::string increment_digits(const std::string& digits) {
  std::string out = digits;
  for (std::size_t i = out.size(); i-- > 0;) {
    if (out[i] != '9') {
      ++out[i];
      return out;
    }
    out[i] = '0';
  }
  return "1" + out;
}

}  // namespace

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::CorpusReplay: return "replay";
    case GeneratorKind::Mangler: return "mangler";
  }
  return "unknown";
}

CorpusReplayGenerator::CorpusReplayGenerator(const PasswordCorpus& owned)
    : order_(owned.by_frequency()) {}

std::optional<std::string> CorpusReplayGenerator::next() {
  if (pos_ == order_.size()) return std::nullopt;
  return order_[pos_++].password;
}

ManglerGenerator::ManglerGenerator(const PasswordCorpus& seed_pool,
                                   std::size_t max_length)
    : max_length_(max_length) {
  for (const auto& e : seed_pool.by_frequency()) pool_.push_back(e.password);
}

ManglerGenerator::ManglerGenerator(std::vector<std::string> bases,
                                   std::size_t max_length)
    : pool_(bases.begin(), bases.end()), max_length_(max_length) {}

std::vector<std::string> ManglerGenerator::variants(const std::string& base) {
  std::vector<std::string> out;
  out.push_back(base);
  if (base.empty()) return out;

  auto mapped = [&](auto fn) {
    std::string s = base;
    for (auto& c : s) c = fn(static_cast<unsigned char>(c));
    return s;
  };
  std::string cap = mapped([](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
  out.push_back(cap);
  out.push_back(mapped([](unsigned char c) { return static_cast<char>(std::toupper(c)); }));
  out.push_back(mapped([](unsigned char c) { return static_cast<char>(std::tolower(c)); }));
  out.push_back(mapped([](unsigned char c) {
    if (std::isupper(c)) return static_cast<char>(std::tolower(c));
    return static_cast<char>(std::toupper(c));
  }));

  out.push_back(mapped([](unsigned char c) {
    char l = leet_of(static_cast<char>(std::tolower(c)));
    return l ? l : static_cast<char>(c);
  }));
  out.push_back(mapped([](unsigned char c) {
    char u = unleet_of(static_cast<char>(c));
    return u ? u : static_cast<char>(c);
  }));
  for (std::size_t i = 0; i < base.size(); ++i) {
    char l = leet_of(static_cast<char>(std::tolower(static_cast<unsigned char>(base[i]))));
    if (!l) continue;
    std::string s = base;
    s[i] = l;
    out.push_back(std::move(s));
  }

  const std::size_t tail = trailing_digits(base);
  const std::string stem = base.substr(0, base.size() - tail);
  if (tail > 0) out.push_back(stem + increment_digits(base.substr(stem.size())));
  for (char d : std::string_view("1234567890")) out.push_back(base + d);
  out.push_back(base + "123");
  if (tail > 0 && tail < base.size()) out.push_back(stem);

  if (tail > 0 && tail < base.size())
    out.push_back(base.substr(stem.size()) + stem);
  const std::size_t head = leading_digits(base);
  if (head > 0 && head < base.size())
    out.push_back(base.substr(head) + base.substr(0, head));
  return out;
}

void ManglerGenerator::accept(const std::string& password) {
  if (!expanded_.count(password)) accepted_.push_back(password);
}

bool ManglerGenerator::load_next_base() {
  for (;;) {
    std::string base;
    const bool take_accepted = !accepted_.empty() && (pool_.empty() || !last_from_accepted_);
    if (take_accepted) {
      base = std::move(accepted_.front());
      accepted_.pop_front();
    } else if (!pool_.empty()) {
      base = std::move(pool_.front());
      pool_.pop_front();
    } else {
      return false;
    }
    if (!expanded_.insert(base).second) continue;
    last_from_accepted_ = take_accepted;
    current_.clear();
    current_pos_ = 0;
    for (auto& v : variants(base))
      if (is_clean_password(v, max_length_) && !emitted_.count(v))
        current_.push_back(std::move(v));
    if (!current_.empty()) return true;
  }
}

std::optional<std::string> ManglerGenerator::next() {
  for (;;) {
    while (current_pos_ < current_.size()) {
      std::string& v = current_[current_pos_++];
      if (emitted_.insert(v).second) return v;
    }
    if (!load_next_base()) return std::nullopt;
  }
}

GenerateResult generate(QueryGenerator& gen, std::size_t n) {
  if (n == 0) throw ArgumentError("generate needs n >= 1");
  GenerateResult r;
  r.passwords.reserve(n);
  while (r.passwords.size() < n) {
    auto pw = gen.next();
    if (!pw) {
      r.exhausted = true;
      break;
    }
    r.passwords.push_back(std::move(*pw));
  }
  return r;
}

StealReport run_campaign(const PasswordModel& target,
                         const PasswordCorpus& truth, QueryGenerator& gen,
                         const ThresholdAttack& attack,
                         const CampaignOptions& options) {
  if (options.budget == 0) throw ArgumentError("campaign budget must be >= 1");
  if (!(options.target_precision > 0.0 && options.target_precision <= 1.0))
    throw ArgumentError("target precision must be in (0, 1]");

  struct Hit {
    std::string password;
    double prob;
    bool member;
  };
  std::vector<Hit> predicted;
  StealReport r;
  r.target_precision = options.target_precision;
  while (r.queries_issued < options.budget) {
    auto pw = gen.next();
    if (!pw) {
      r.generator_exhausted = true;
      break;
    }
    ++r.queries_issued;
    const double p = target.prob(*pw);
    if (!attack.is_member(p)) continue;
    if (options.feedback) gen.accept(*pw);
    const bool member = truth.contains(*pw);
    predicted.push_back({std::move(*pw), p, member});
  }
  r.predicted_members = predicted.size();
  for (const auto& h : predicted) r.true_members += h.member ? 1 : 0;
  r.raw_precision = predicted.empty() ? 0.0
                                      : static_cast<double>(r.true_members) /
                                            static_cast<double>(r.predicted_members);

  std::sort(predicted.begin(), predicted.end(), [](const Hit& a, const Hit& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.password < b.password;
  });
  // Every cut sits at a distinct-probability boundary; scan them all and keep
  // the one with the most members at the required precision (highest cut on
  // ties).
  std::size_t best_len = 0;
  std::uint64_t best_members = 0, members = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    members += predicted[i].member ? 1 : 0;
    const bool boundary =
        i + 1 == predicted.size() || predicted[i + 1].prob != predicted[i].prob;
    if (!boundary) continue;
    const double precision =
        static_cast<double>(members) / static_cast<double>(i + 1);
    if (precision >= options.target_precision && members > best_members) {
      best_members = members;
      best_len = i + 1;
    }
  }
  if (best_len == 0) {
    r.precision_unreachable = true;
    r.final_threshold = predicted.empty() ? attack.delta : predicted.front().prob;
    return r;
  }
  r.final_threshold = predicted[best_len - 1].prob;
  r.retained = best_len;
  r.stolen = best_members;
  r.achieved_precision =
      static_cast<double>(r.stolen) / static_cast<double>(r.retained);
  for (std::size_t i = 0; i < best_len; ++i)
    if (predicted[i].member) r.stolen_passwords.push_back(predicted[i].password);
  std::sort(r.stolen_passwords.begin(), r.stolen_passwords.end());
  return r;
}

std::vector<UpperBoundPoint> upper_bound(const PasswordModel& model,
                                         const PasswordCorpus& train,
                                         const std::vector<std::uint64_t>& g_list) {
  auto fit = fit_g(model, train, g_list);
  std::vector<UpperBoundPoint> out;
  out.reserve(fit.points.size());
  for (const auto& p : fit.points)
    out.push_back({p.g, p.fit, p.members, p.emitted, p.exhausted});
  return out;
}

std::string FrequencyInterval::label() const {
  std::string s = "(" + std::to_string(lo) + ",";
  s += hi == 0 ? std::string("inf)") : std::to_string(hi) + "]";
  return s;
}

std::vector<FrequencyInterval> default_frequency_intervals() {
  return {{0, 10}, {10, 100}, {100, 1000}, {1000, 0}};
}

std::vector<FrequencyBucket> frequency_breakdown(
    const std::vector<std::string>& stolen, const PasswordCorpus& truth,
    const std::vector<FrequencyInterval>& intervals) {
  if (intervals.empty()) throw ArgumentError("no frequency intervals");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    const bool last = i + 1 == intervals.size();
    if (iv.hi == 0 ? !last : iv.hi <= iv.lo)
      throw ArgumentError("frequency intervals must be ascending and disjoint");
    if (!last && intervals[i + 1].lo < iv.hi)
      throw ArgumentError("frequency intervals must be ascending and disjoint");
  }
  std::vector<FrequencyBucket> buckets;
  for (const auto& iv : intervals) buckets.push_back({iv, 0, std::nullopt});
  for (const auto& pw : stolen) {
    const std::uint64_t c = truth.count(pw);
    for (auto& b : buckets)
      if (c > b.interval.lo && (b.interval.hi == 0 || c <= b.interval.hi)) {
        ++b.stolen;
        break;
      }
  }
  for (auto& b : buckets)
    if (b.stolen > 0)
      b.share = static_cast<double>(b.stolen) / static_cast<double>(stolen.size());
  return buckets;
}

}  // namespace psmaudit
