#pragma once

#include <bitset>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "psmaudit/bpe.hpp"
#include "psmaudit/model.hpp"

namespace psmaudit {

class BinaryReader;

class ListModel final : public PasswordModel {
 public:
  static std::unique_ptr<ListModel> train(const PasswordCorpus& corpus,
                                          const ModelParams& params);
  static std::unique_ptr<ListModel> read(ModelInfo info, BinaryReader& in);

  double prob(std::string_view password) const override;
  std::vector<double> token_probs(std::string_view password) const override;
  CandidateStream enumerate(std::size_t max_length) const override;
  std::optional<Sample> sample(Rng& rng) const override;
  void write_payload(BinaryWriter& out) const override;

  const std::vector<CorpusEntry>& by_frequency() const { return ranked_; }

 private:
  ListModel(ModelInfo info, std::vector<CorpusEntry> entries);

  std::vector<CorpusEntry> ranked_;  // descending count, ties lexicographic
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

namespace markov {

inline constexpr std::uint8_t kEnd = 0;    // end-of-password symbol
inline constexpr std::uint8_t kStart = 1;  // start padding
inline constexpr int kMaxOrder = 8;        // context of up to 7 symbols

struct Transition {
  std::uint8_t symbol = 0;
  std::uint64_t count = 0;
};

struct Row {
  std::uint64_t key = 0;
  std::uint64_t total = 0;
  std::uint32_t begin = 0;
  std::uint32_t size = 0;
};

// Packs up to 7 seven-bit symbols plus the context length (bits 49..51),
// leaving room for a 7-bit symbol when shifted left by 7.
std::uint64_t context_key(std::string_view symbols);

}  // namespace markov

// Character-level Markov chain covering NGram, AdaptiveNGram and Backoff. The
// conditional at a context is (count + k) / (total + k * |alphabet + end|).
class MarkovModel final : public PasswordModel {
 public:
  using Row = markov::Row;

  static std::unique_ptr<MarkovModel> train(ModelKind kind,
                                            const PasswordCorpus& corpus,
                                            const ModelParams& params);
  static std::unique_ptr<MarkovModel> read(ModelInfo info, BinaryReader& in);

  double prob(std::string_view password) const override;
  std::vector<double> token_probs(std::string_view password) const override;
  CandidateStream enumerate(std::size_t max_length) const override;
  std::optional<Sample> sample(Rng& rng) const override;
  void write_payload(BinaryWriter& out) const override;

  // Row that predicts the symbol following prefix; nullptr if unseen.
  const Row* context_row(std::string_view prefix) const;
  double cond(const Row* row, std::uint8_t symbol) const;
  std::span<const markov::Transition> transitions(const Row* row) const;
  const std::vector<std::uint8_t>& alphabet() const { return alphabet_; }
  bool in_alphabet(unsigned char c) const { return c < 128 && alphabet_bits_[c]; }
  double smoothing() const { return k_; }

  // (context key, symbol) -> count, exposed for inspection in tests.
  std::uint64_t transition_count(std::string_view context,
                                 std::uint8_t symbol) const;
  std::size_t row_count() const { return rows_.size(); }

 private:
  struct Counts;
  MarkovModel(ModelInfo info, std::vector<std::uint8_t> alphabet,
              const Counts& counts);

  bool backoff_ = false;
  int context_len_ = 3;
  std::uint64_t threshold_ = 0;
  double k_ = 0.0;
  std::vector<std::uint8_t> alphabet_;  // sorted, kEnd first
  std::bitset<128> alphabet_bits_;
  std::unordered_map<std::uint64_t, std::uint32_t> row_index_;
  std::vector<Row> rows_;
  std::vector<markov::Transition> transitions_;  // count desc, symbol asc
};

// Template grammar shared by the class-run PCFG and the BPE chunk PCFG.
class GrammarModel final : public PasswordModel {
 public:
  struct Terminal {
    std::string text;
    std::uint64_t count = 0;
    double prob = 0.0;
  };
  struct Table {
    std::vector<Terminal> items;  // prob desc, text asc
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<double> cumulative;
    std::uint64_t total = 0;
  };
  struct Template {
    std::vector<std::uint32_t> labels;
    std::string key;
    std::uint64_t count = 0;
    double prob = 0.0;
    std::size_t length = 0;  // characters in every derivation
  };

  static std::unique_ptr<GrammarModel> train(ModelKind kind,
                                             const PasswordCorpus& corpus,
                                             const ModelParams& params);
  static std::unique_ptr<GrammarModel> read(ModelInfo info, BinaryReader& in);

  double prob(std::string_view password) const override;
  std::vector<double> token_probs(std::string_view password) const override;
  CandidateStream enumerate(std::size_t max_length) const override;
  std::optional<Sample> sample(Rng& rng) const override;
  void write_payload(BinaryWriter& out) const override;

  // Class runs (PCFG) or BPE chunks (chunk PCFG).
  std::vector<std::string> segment(std::string_view password) const;
  // "L3", "D2", "S1", or "DM4" for a mixed chunk.
  static std::string label_of(std::string_view segment);

  bool chunked() const { return chunked_; }
  const std::vector<Template>& templates() const { return templates_; }
  const std::vector<Table>& tables() const { return tables_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  const MergeTable& merges() const { return merges_; }

 private:
  struct Counts;
  GrammarModel(ModelInfo info, MergeTable merges, Counts counts);

  bool chunked_ = false;
  MergeTable merges_;
  std::vector<std::string> label_names_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::vector<Table> tables_;
  std::vector<Template> templates_;  // prob desc, key asc
  std::unordered_map<std::string, std::uint32_t> template_index_;
  std::vector<double> template_cumulative_;
};

// Draws an index from a cumulative distribution (last entry ~ 1).
std::size_t draw_from_cumulative(const std::vector<double>& cumulative,
                                 double u);

}  // namespace psmaudit
