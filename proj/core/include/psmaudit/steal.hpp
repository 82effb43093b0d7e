#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "psmaudit/corpus.hpp"
#include "psmaudit/mia.hpp"
#include "psmaudit/model.hpp"

namespace psmaudit {

enum class GeneratorKind { CorpusReplay, Mangler };
std::string_view to_string(GeneratorKind kind);

// Source of stealing queries. Emits each password at most once. accept()
// feeds a predicted member back; generators that ignore feedback may no-op.
class QueryGenerator {
 public:
  virtual ~QueryGenerator() = default;
  virtual GeneratorKind kind() const = 0;
  virtual std::optional<std::string> next() = 0;
  virtual void accept(const std::string& password) = 0;
};

// Streams the owned corpus by descending frequency.
class CorpusReplayGenerator final : public QueryGenerator {
 public:
  explicit CorpusReplayGenerator(const PasswordCorpus& owned);
  GeneratorKind kind() const override { return GeneratorKind::CorpusReplay; }
  std::optional<std::string> next() override;
  void accept(const std::string&) override {}

 private:
  std::vector<CorpusEntry> order_;
  std::size_t pos_ = 0;
};

// Rule-based generator over a seed pool. For each base it emits the base
// itself followed by its variants, rule families in this fixed order:
//   case:   Capitalized, UPPER, lower, tOGGLED
//   leet:   full substitution (a@ e3 i1 o0 s$ t7), full reversal,
//           then one substitution at a time left to right
//   digits: trailing number + 1, append 1, 2, .., 9, 0, append 123,
//           drop trailing digits
//   affix:  trailing digits moved to the front, leading digits to the end
// accept() queues the password as a base. Queued bases alternate with the
// pool, so output clusters near accepted items without starving the pool.
class ManglerGenerator final : public QueryGenerator {
 public:
  // Pool in descending frequency order.
  explicit ManglerGenerator(const PasswordCorpus& seed_pool,
                            std::size_t max_length = kDefaultMaxPasswordLength);
  explicit ManglerGenerator(std::vector<std::string> bases,
                            std::size_t max_length = kDefaultMaxPasswordLength);

  GeneratorKind kind() const override { return GeneratorKind::Mangler; }
  std::optional<std::string> next() override;
  void accept(const std::string& password) override;

  // All rule outputs for one base, in emission order, before deduplication.
  static std::vector<std::string> variants(const std::string& base);

 private:
  bool load_next_base();

  std::deque<std::string> pool_;
  std::deque<std::string> accepted_;
  std::vector<std::string> current_;
  std::size_t current_pos_ = 0;
  std::unordered_set<std::string> emitted_;
  std::unordered_set<std::string> expanded_;
  std::size_t max_length_;
  bool last_from_accepted_ = false;
};

struct GenerateResult {
  std::vector<std::string> passwords;
  bool exhausted = false;
};

GenerateResult generate(QueryGenerator& gen, std::size_t n);

struct CampaignOptions {
  std::size_t budget = 1;
  double target_precision = 0.9;
  bool feedback = true;  // call gen.accept() on predicted members
};

struct StealReport {
  std::uint64_t queries_issued = 0;
  std::uint64_t predicted_members = 0;
  std::uint64_t true_members = 0;       // members among all predictions
  double raw_precision = 0.0;           // true_members / predicted_members
  double final_threshold = 0.0;
  std::uint64_t retained = 0;           // predictions with prob >= final
  std::uint64_t stolen = 0;             // true members among retained
  double achieved_precision = 0.0;      // stolen / retained
  double target_precision = 0.9;
  bool generator_exhausted = false;
  bool precision_unreachable = false;   // stolen forced to 0
  std::vector<std::string> stolen_passwords;  // retained true members
};

// Issues up to budget queries, predicts membership with the attack, then
// picks the probability cut over the predictions that keeps precision
// (against truth) >= target_precision and keeps the most members.
StealReport run_campaign(const PasswordModel& target,
                         const PasswordCorpus& truth, QueryGenerator& gen,
                         const ThresholdAttack& attack,
                         const CampaignOptions& options);

struct UpperBoundPoint {
  std::uint64_t g = 0;
  double fraction = 0.0;       // members among the top g
  std::uint64_t members = 0;
  std::uint64_t emitted = 0;
  bool exhausted = false;
};

// The best possible stealing sequence is the model's own top-G list, so the
// bound is the member fraction of enumerate_top(G).
std::vector<UpperBoundPoint> upper_bound(const PasswordModel& model,
                                         const PasswordCorpus& train,
                                         const std::vector<std::uint64_t>& g_list);

// Left-open, right-closed count interval (lo, hi]; hi = 0 means unbounded.
struct FrequencyInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::string label() const;
};

struct FrequencyBucket {
  FrequencyInterval interval;
  std::uint64_t stolen = 0;
  std::optional<double> share;  // nullopt when the bucket is empty
};

std::vector<FrequencyInterval> default_frequency_intervals();

// Buckets stolen passwords by their count in truth; share is the fraction of
// all stolen passwords that fall in each bucket. Throws ArgumentError when
// intervals are not ascending and disjoint.
std::vector<FrequencyBucket> frequency_breakdown(
    const std::vector<std::string>& stolen, const PasswordCorpus& truth,
    const std::vector<FrequencyInterval>& intervals);

}  // namespace psmaudit
