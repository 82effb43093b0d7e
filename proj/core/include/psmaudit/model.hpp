#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmaudit/corpus.hpp"
#include "psmaudit/rng.hpp"

namespace psmaudit {

enum class ModelKind : std::uint8_t {
  List = 0,
  NGram = 1,
  Backoff = 2,
  AdaptiveNGram = 3,
  Pcfg = 4,
  ChunkPcfg = 5,
};

std::string_view to_string(ModelKind kind);
// Accepts the names produced by to_string plus the CLI spellings
// ("list", "ngram", "backoff", "adaptive", "pcfg", "chunk-pcfg").
ModelKind parse_model_kind(std::string_view name);

struct ModelParams {
  // n-gram length for NGram/AdaptiveNGram, longest gram for Backoff. 2..8.
  int order = 4;
  // Additive smoothing constant over alphabet plus end symbol (Markov kinds).
  double smoothing = 0.01;
  // Per-occurrence extra-increment probability (AdaptiveNGram).
  double gamma = 5e-6;
  // Minimum context count for a Backoff context to be used.
  std::uint64_t backoff_threshold = 10;
  // BPE vocabulary size (ChunkPcfg).
  std::size_t vocab_size = 10000;
  // BPE stops when the best pair occurs fewer times than this.
  std::uint64_t min_merge_count = 2;
  // Longest candidate the enumerator emits.
  std::size_t max_length = kDefaultMaxPasswordLength;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Self-describing metadata stored in the model file header.
struct ModelInfo {
  ModelKind kind = ModelKind::List;
  ModelParams params;
  std::uint64_t corpus_fingerprint = 0;
  std::uint64_t corpus_total = 0;
  std::uint64_t corpus_unique = 0;
  std::string source_label;
};

struct Candidate {
  std::uint64_t rank = 0;  // 1-based
  std::string password;
  double prob = 0.0;
};

struct RawCandidate {
  std::string password;
  double prob = 0.0;
};

// Producer side of an enumeration: yields every supported password exactly
// once, in non-increasing probability. Order among equal probabilities is
// unspecified; CandidateStream fixes it.
class CandidateSource {
 public:
  virtual ~CandidateSource() = default;
  virtual std::optional<RawCandidate> next() = 0;
};

// Ranked view over a CandidateSource. Equal-probability runs are buffered and
// released in lexicographic order, so ranks are deterministic. The stream
// borrows the model that created it; keep the model alive while iterating.
// Single consumer.
class CandidateStream {
 public:
  explicit CandidateStream(std::unique_ptr<CandidateSource> source);

  std::optional<Candidate> next();
  // Up to g further candidates.
  std::vector<Candidate> take(std::size_t g);
  bool exhausted() const { return exhausted_ && pos_ == batch_.size(); }

  // Largest tie batch buffered so far; the frontier memory bound.
  std::size_t max_batch() const { return max_batch_; }

 private:
  void refill();

  std::unique_ptr<CandidateSource> source_;
  std::vector<RawCandidate> batch_;
  std::size_t pos_ = 0;
  std::optional<RawCandidate> lookahead_;
  std::uint64_t emitted_ = 0;
  std::size_t max_batch_ = 0;
  bool exhausted_ = false;
};

// A password drawn from a model together with its probability.
struct Sample {
  std::string password;
  double prob = 0.0;
};

class BinaryWriter;
class BinaryReader;

class PasswordModel {
 public:
  virtual ~PasswordModel() = default;

  const ModelInfo& info() const { return info_; }
  ModelKind kind() const { return info_.kind; }

  // Probability in [0,1]; 0 for unsupported characters. Never throws.
  virtual double prob(std::string_view password) const = 0;

  // Per-token factors whose left-to-right product is prob(password): one
  // conditional per character plus the end symbol for Markov kinds, the
  // template then terminals for grammar kinds, a single value for List.
  // Empty when the password has no derivation.
  virtual std::vector<double> token_probs(std::string_view password) const = 0;

  // Candidates with length 1..max_length in rank order.
  virtual CandidateStream enumerate(std::size_t max_length) const = 0;
  CandidateStream enumerate() const { return enumerate(info_.params.max_length); }

  // Ancestral sample. nullopt means the draw was rejected (for example a
  // non-canonical chunk derivation); callers count it as an attempt.
  virtual std::optional<Sample> sample(Rng& rng) const = 0;

  virtual void write_payload(BinaryWriter& out) const = 0;

 protected:
  explicit PasswordModel(ModelInfo info) : info_(std::move(info)) {}

  ModelInfo info_;
};

// Deterministic given corpus and params (including params.seed). Throws
// EmptyInputError for an empty corpus and ArgumentError for bad params.
std::unique_ptr<PasswordModel> train(ModelKind kind,
                                     const PasswordCorpus& corpus,
                                     const ModelParams& params);

// First min(g, |support|) candidates.
std::vector<Candidate> enumerate_top(const PasswordModel& model, std::size_t g);
std::vector<Candidate> enumerate_top(const PasswordModel& model, std::size_t g,
                                     std::size_t max_length);

// Versioned binary model files; the layout is documented in serialize.cpp.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const PasswordModel& model, const std::filesystem::path& path);
std::unique_ptr<PasswordModel> load_model(const std::filesystem::path& path);

std::string serialize_model(const PasswordModel& model);
std::unique_ptr<PasswordModel> deserialize_model(std::string_view bytes);

// Metadata as a JSON object string (kind, params, fingerprint, ...).
std::string model_info_json(const ModelInfo& info);

}  // namespace psmaudit
