#include "psmaudit/targeted.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <span>

#include "format.hpp"
#include "psmaudit/error.hpp"
#include "psmaudit/parallel.hpp"
#include "psmaudit/rng.hpp"

namespace psmaudit {

namespace {

constexpr std::size_t kMaxAffixes = 50;
constexpr std::string_view kDefaultDigitOrder = "1234567890";

constexpr std::pair<char, char> kLeet[] = {
    {'a', '@'}, {'e', '3'}, {'i', '1'}, {'o', '0'}, {'s', '$'}, {'t', '7'}};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// Length of the trailing / leading non-letter run.
std::size_t tail_len(const std::string& s) {
  std::size_t n = 0;
  while (n < s.size() && !is_alpha(s[s.size() - 1 - n])) ++n;
  return n;
}
std::size_t head_len(const std::string& s) {
  std::size_t n = 0;
  while (n < s.size() && !is_alpha(s[n])) ++n;
  return n;
}

std::vector<std::string> ranked_keys(const std::map<std::string, std::uint64_t>& counts,
                                     std::size_t limit) {
  std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) out.push_back(v[i].first);
  return out;
}

}  // namespace

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Identity: return "identity";
    case RuleKind::CaseToggle: return "case-toggle";
    case RuleKind::Leet: return "leet";
    case RuleKind::DigitAppend: return "digit-append";
    case RuleKind::DigitIncrement: return "digit-increment";
    case RuleKind::DigitDelete: return "digit-delete";
    case RuleKind::SuffixSwap: return "suffix-swap";
    case RuleKind::PrefixSwap: return "prefix-swap";
  }
  return "unknown";
}

TargetedGenerator::TargetedGenerator()
    : digit_order_(kDefaultDigitOrder.begin(), kDefaultDigitOrder.end()) {
  for (std::size_t i = 0; i < kRuleCount; ++i)
    ranked_.push_back({static_cast<RuleKind>(i), 0});
}

std::uint64_t TargetedGenerator::weight(RuleKind rule) const {
  return weights_[static_cast<std::size_t>(rule)];
}

std::vector<std::string> TargetedGenerator::apply(RuleKind rule,
                                                  const std::string& pw) const {
  std::vector<std::string> out;
  auto add = [&](std::string s) {
    if (s != pw && std::find(out.begin(), out.end(), s) == out.end())
      out.push_back(std::move(s));
  };
  switch (rule) {
    case RuleKind::Identity:
      out.push_back(pw);
      break;
    case RuleKind::CaseToggle: {
      if (pw.empty()) break;
      std::string lower = pw, upper = pw, cap, flip = pw;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      cap = lower;
      cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
      auto u0 = static_cast<unsigned char>(flip[0]);
      flip[0] = static_cast<char>(std::isupper(u0) ? std::tolower(u0) : std::toupper(u0));
      add(cap);
      add(lower);
      add(upper);
      add(flip);
      break;
    }
    case RuleKind::Leet: {
      std::string sub = pw, unsub = pw;
      for (auto& c : sub) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        for (auto [plain, s] : kLeet)
          if (l == plain) c = s;
      }
      for (auto& c : unsub)
        for (auto [plain, s] : kLeet)
          if (c == s) c = plain;
      add(sub);
      add(unsub);
      break;
    }
    case RuleKind::DigitAppend:
      for (char d : digit_order_) add(pw + d);
      break;
    case RuleKind::DigitIncrement: {
      std::size_t n = 0;
      while (n < pw.size() && is_digit(pw[pw.size() - 1 - n])) ++n;
      if (n == 0) break;
      std::string digits = pw.substr(pw.size() - n);
      std::size_t i = digits.size();
      while (i > 0 && digits[i - 1] == '9') digits[--i] = '0';
      if (i == 0)
        digits.insert(digits.begin(), '1');
      else
        ++digits[i - 1];
      add(pw.substr(0, pw.size() - n) + digits);
      break;
    }
    case RuleKind::DigitDelete: {
      std::size_t n = 0;
      while (n < pw.size() && is_digit(pw[pw.size() - 1 - n])) ++n;
      if (n == 0 || n == pw.size()) break;
      add(pw.substr(0, pw.size() - 1));
      add(pw.substr(0, pw.size() - n));
      break;
    }
    case RuleKind::SuffixSwap: {
      const std::string stem = pw.substr(0, pw.size() - tail_len(pw));
      if (stem.empty()) break;
      for (const auto& s : suffixes_) add(stem + s);
      break;
    }
    case RuleKind::PrefixSwap: {
      const std::string rest = pw.substr(head_len(pw));
      if (rest.empty()) break;
      for (const auto& p : prefixes_) add(p + rest);
      break;
    }
  }
  return out;
}

std::vector<std::string> TargetedGenerator::variants(const std::string& leak) const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto push = [&](const std::string& s) {
    if (out.size() >= candidate_limit_) return false;
    if (is_clean_password(s) && seen.insert(s).second) out.push_back(s);
    return out.size() < candidate_limit_;
  };
  // The leak itself only ever comes from the identity rule.
  seen.insert(leak);
  for (const auto& rw : ranked_) {
    for (const auto& s : apply(rw.rule, leak)) {
      if (rw.rule == RuleKind::Identity) {
        if (is_clean_password(s)) out.push_back(s);
        if (out.size() >= candidate_limit_) return out;
        continue;
      }
      if (!push(s)) return out;
    }
  }
  for (const auto& r1 : ranked_) {
    if (r1.rule == RuleKind::Identity) continue;
    for (const auto& mid : apply(r1.rule, leak))
      for (const auto& r2 : ranked_) {
        if (r2.rule == RuleKind::Identity || r2.rule == r1.rule) continue;
        for (const auto& s : apply(r2.rule, mid))
          if (!push(s)) return out;
      }
  }
  return out;
}

TargetedGenerator learn_rules(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw ArgumentError("rule learning needs at least one pair");
  TargetedGenerator gen;
  std::map<std::string, std::uint64_t> suffix_counts, prefix_counts;
  std::map<char, std::uint64_t> digit_counts;
  for (const auto& [old_pw, new_pw] : pairs) {
    const std::string stem = old_pw.substr(0, old_pw.size() - tail_len(old_pw));
    if (!stem.empty() && new_pw.size() > stem.size() &&
        new_pw.compare(0, stem.size(), stem) == 0 &&
        tail_len(new_pw) == new_pw.size() - stem.size())
      ++suffix_counts[new_pw.substr(stem.size())];
    const std::string rest = old_pw.substr(head_len(old_pw));
    if (!rest.empty() && new_pw.size() > rest.size() &&
        new_pw.compare(new_pw.size() - rest.size(), rest.size(), rest) == 0 &&
        head_len(new_pw) == new_pw.size() - rest.size())
      ++prefix_counts[new_pw.substr(0, new_pw.size() - rest.size())];
    if (new_pw.size() == old_pw.size() + 1 && is_digit(new_pw.back()) &&
        new_pw.compare(0, old_pw.size(), old_pw) == 0)
      ++digit_counts[new_pw.back()];
  }
  gen.suffixes_ = ranked_keys(suffix_counts, kMaxAffixes);
  gen.prefixes_ = ranked_keys(prefix_counts, kMaxAffixes);
  std::stable_sort(gen.digit_order_.begin(), gen.digit_order_.end(),
                   [&](char a, char b) { return digit_counts[a] > digit_counts[b]; });

  for (const auto& [old_pw, new_pw] : pairs) {
    bool explained = false;
    for (std::size_t r = 0; r < kRuleCount; ++r) {
      auto outs = gen.apply(static_cast<RuleKind>(r), old_pw);
      if (std::find(outs.begin(), outs.end(), new_pw) != outs.end()) {
        ++gen.weights_[r];
        explained = true;
      }
    }
    if (!explained) ++gen.unexplained_;
  }
  gen.trained_pairs_ = pairs.size();
  gen.ranked_.clear();
  for (std::size_t r = 0; r < kRuleCount; ++r)
    gen.ranked_.push_back({static_cast<RuleKind>(r), gen.weights_[r]});
  std::stable_sort(gen.ranked_.begin(), gen.ranked_.end(),
                   [](const RuleWeight& a, const RuleWeight& b) { return a.weight > b.weight; });
  return gen;
}

std::vector<std::pair<std::string, std::string>> training_pairs(
    const AccountStore& accounts) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [email, pws] : accounts.accounts()) {
    if (pws.size() < 2) continue;
    auto it = pws.begin();
    const std::string& a = *it++;
    const std::string& b = *it;
    out.emplace_back(a, b);
    out.emplace_back(b, a);
  }
  return out;
}

UsedSet::UsedSet(const std::vector<std::string>& passwords)
    : members_(passwords.begin(), passwords.end()) {}

bool UsedSet::contains(std::string_view pw) const {
  return members_.count(std::string(pw)) > 0;
}

SimulationReport simulate(const AccountStore& accounts,
                          const TargetedGenerator& gen, const UsedSet& used,
                          const SimulationConfig& cfg,
                          const GuessNumberFn& strength) {
  if (cfg.n_users == 0) throw ArgumentError("n_users must be >= 1");
  if (cfg.caps.empty()) throw ArgumentError("at least one guess cap is required");
  for (std::size_t i = 0; i < cfg.caps.size(); ++i)
    if (cfg.caps[i] == 0 || (i > 0 && cfg.caps[i] <= cfg.caps[i - 1]))
      throw ArgumentError("guess caps must be positive and ascending");

  std::vector<const std::set<std::string>*> users;
  for (const auto& [email, pws] : accounts.accounts())
    if (pws.size() >= 2) users.push_back(&pws);
  Rng order_rng(derive_seed(cfg.seed, "simulate-users"));
  order_rng.shuffle(std::span<const std::set<std::string>*>(users));

  struct Pick {
    std::string leak, target;
  };
  std::vector<Pick> picks;
  const std::uint64_t pick_base = derive_seed(cfg.seed, "simulate-pick");
  for (std::size_t u = 0; u < users.size() && picks.size() < cfg.n_users; ++u) {
    std::vector<const std::string*> targets;
    for (const auto& pw : *users[u]) {
      if (used.contains(pw)) continue;
      if (strength && strength(pw) < cfg.weak_guess_threshold) continue;
      targets.push_back(&pw);
    }
    if (targets.empty()) continue;
    Rng rng(pick_base ^ (0x9e3779b97f4a7c15ull * (u + 1)));
    const std::string* target = targets[rng.below(targets.size())];
    std::vector<const std::string*> leaks;
    for (const auto& pw : *users[u])
      if (&pw != target) leaks.push_back(&pw);
    const std::string* leak = leaks[rng.below(leaks.size())];
    picks.push_back({*leak, *target});
  }

  SimulationReport rep;
  rep.requested_users = cfg.n_users;
  rep.eligible_users = picks.size();
  rep.evaluated_users = picks.size();
  rep.insufficient_users = picks.size() < cfg.n_users;
  rep.horizon = cfg.caps.back();
  rep.outcomes.resize(picks.size());

  parallel_for(picks.size(), cfg.threads, [&](std::size_t i) {
    const auto cands = gen.variants(picks[i].leak);
    UserOutcome o;
    o.user_index = i;
    std::size_t skipped = 0;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cands[k] == picks[i].target) {
        o.unfiltered_rank = k + 1;
        o.filtered_rank = k + 1 - skipped;
        o.skipped_before_hit = skipped;
        break;
      }
      if (used.contains(cands[k])) ++skipped;
    }
    rep.outcomes[i] = o;
  });

  for (std::size_t cap : cfg.caps) {
    CapResult c;
    c.cap = cap;
    for (const auto& o : rep.outcomes) {
      if (o.filtered_rank >= 1 && o.filtered_rank <= cap) ++c.filtered_hits;
      if (o.unfiltered_rank >= 1 && o.unfiltered_rank <= cap) ++c.unfiltered_hits;
    }
    if (!rep.outcomes.empty()) {
      const auto n = static_cast<double>(rep.outcomes.size());
      c.filtered_rate = static_cast<double>(c.filtered_hits) / n;
      c.unfiltered_rate = static_cast<double>(c.unfiltered_hits) / n;
    }
    rep.caps.push_back(c);
  }

  std::uint64_t hits = 0, saved = 0;
  for (const auto& o : rep.outcomes) {
    if (o.filtered_rank < 1 || o.filtered_rank > rep.horizon) continue;
    ++hits;
    if (o.filtered_rank < o.unfiltered_rank) {
      ++rep.earlier_guessed;
      saved += o.unfiltered_rank - o.filtered_rank;
    }
  }
  if (hits > 0)
    rep.earlier_guessed_fraction =
        static_cast<double>(rep.earlier_guessed) / static_cast<double>(hits);
  if (rep.earlier_guessed > 0)
    rep.mean_reduced_guesses =
        static_cast<double>(saved) / static_cast<double>(rep.earlier_guessed);
  return rep;
}

std::string simulation_csv(const SimulationReport& report) {
  std::string out = "condition,cap,hits,rate\n";
  for (const char* cond : {"filtered", "unfiltered"}) {
    const bool f = cond[0] == 'f';
    for (const auto& c : report.caps) {
      out += cond;
      out += ',' + std::to_string(c.cap) + ',';
      out += std::to_string(f ? c.filtered_hits : c.unfiltered_hits) + ',';
      out += format_double(f ? c.filtered_rate : c.unfiltered_rate);
      out += '\n';
    }
  }
  return out;
}

}  // namespace psmaudit
