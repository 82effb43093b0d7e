#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psmaudit/corpus.hpp"

namespace psmaudit {

enum class RuleKind : std::uint8_t {
  Identity = 0,
  CaseToggle,
  Leet,
  DigitAppend,
  DigitIncrement,
  DigitDelete,
  SuffixSwap,
  PrefixSwap,
};
inline constexpr std::size_t kRuleCount = 8;
std::string_view to_string(RuleKind kind);

struct RuleWeight {
  RuleKind rule = RuleKind::Identity;
  std::uint64_t weight = 0;  // training pairs this rule explains
};

// Transformation-rule model of how users derive a new password from an old
// one. Learned from (old, new) pairs; produces ranked guesses from a leak.
class TargetedGenerator {
 public:
  TargetedGenerator();

  // Candidates for one leaked password: rules by descending weight (ties in
  // RuleKind order), each rule's outputs in learned order, then two-rule
  // compositions in the same order. Deduplicated, at most candidate_limit.
  std::vector<std::string> variants(const std::string& leak) const;

  // Outputs of one rule applied to pw, in the rule's internal order.
  std::vector<std::string> apply(RuleKind rule, const std::string& pw) const;

  const std::vector<RuleWeight>& ranked_rules() const { return ranked_; }
  std::uint64_t weight(RuleKind rule) const;
  std::uint64_t unexplained_pairs() const { return unexplained_; }
  std::uint64_t training_pairs() const { return trained_pairs_; }

  std::size_t candidate_limit() const { return candidate_limit_; }
  void set_candidate_limit(std::size_t limit) { candidate_limit_ = limit; }

  const std::vector<std::string>& suffixes() const { return suffixes_; }
  const std::vector<std::string>& prefixes() const { return prefixes_; }

 private:
  friend TargetedGenerator learn_rules(
      const std::vector<std::pair<std::string, std::string>>&);

  std::array<std::uint64_t, kRuleCount> weights_{};
  std::vector<RuleWeight> ranked_;
  std::vector<char> digit_order_;      // DigitAppend order
  std::vector<std::string> suffixes_;  // SuffixSwap table
  std::vector<std::string> prefixes_;  // PrefixSwap table
  std::uint64_t unexplained_ = 0;
  std::uint64_t trained_pairs_ = 0;
  std::size_t candidate_limit_ = 1000;
};

// Throws ArgumentError on an empty pair list.
TargetedGenerator learn_rules(
    const std::vector<std::pair<std::string, std::string>>& pairs);

// Pairs for rule learning: for every account with >= 2 passwords, its first
// two passwords (sorted order) in both directions.
std::vector<std::pair<std::string, std::string>> training_pairs(
    const AccountStore& accounts);

// Set of passwords the site's meter already knows (blocklist or stolen set).
class UsedSet {
 public:
  UsedSet() = default;
  explicit UsedSet(const std::vector<std::string>& passwords);
  bool contains(std::string_view pw) const;
  std::size_t size() const { return members_.size(); }

 private:
  std::unordered_set<std::string> members_;
};

struct SimulationConfig {
  std::size_t n_users = 100000;
  std::vector<std::size_t> caps = {5, 10, 100};
  double weak_guess_threshold = 1e6;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Strength oracle of the victim site's meter: returns a guess number for a
// candidate target. Targets below cfg.weak_guess_threshold are excluded.
using GuessNumberFn = std::function<double(const std::string&)>;

struct UserOutcome {
  std::size_t user_index = 0;
  std::size_t unfiltered_rank = 0;  // 0 = not in the candidate list
  std::size_t filtered_rank = 0;
  std::size_t skipped_before_hit = 0;
};

struct CapResult {
  std::size_t cap = 0;
  double filtered_rate = 0.0;
  double unfiltered_rate = 0.0;
  std::uint64_t filtered_hits = 0;
  std::uint64_t unfiltered_hits = 0;
};

struct SimulationReport {
  std::size_t requested_users = 0;
  std::size_t evaluated_users = 0;
  std::size_t eligible_users = 0;
  bool insufficient_users = false;
  std::size_t horizon = 0;               // largest cap
  std::vector<CapResult> caps;
  // Among users hit by the filtered attack within the horizon, the fraction
  // hit strictly earlier than without filtering.
  double earlier_guessed_fraction = 0.0;
  std::uint64_t earlier_guessed = 0;
  // Mean guesses saved over those earlier-guessed users.
  double mean_reduced_guesses = 0.0;
  std::vector<UserOutcome> outcomes;
};

// Per sampled user: one password is the leak, another the target. Candidates
// from gen.variants(leak) are consumed in order; the filtered attacker skips
// candidates in `used` without spending a guess. Users qualify when they have
// >= 2 passwords and some password is neither in `used` nor weak per
// `strength` (when provided).
SimulationReport simulate(const AccountStore& accounts,
                          const TargetedGenerator& gen, const UsedSet& used,
                          const SimulationConfig& cfg,
                          const GuessNumberFn& strength = {});

std::string simulation_csv(const SimulationReport& report);

}  // namespace psmaudit
