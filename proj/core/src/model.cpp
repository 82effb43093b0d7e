#include "psmaudit/model.hpp"

#include <algorithm>

#include "models_impl.hpp"
#include "psmaudit/error.hpp"

namespace psmaudit {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::List: return "list";
    case ModelKind::NGram: return "ngram";
    case ModelKind::Backoff: return "backoff";
    case ModelKind::AdaptiveNGram: return "adaptive";
    case ModelKind::Pcfg: return "pcfg";
    case ModelKind::ChunkPcfg: return "chunk-pcfg";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::List, ModelKind::NGram, ModelKind::Backoff,
                 ModelKind::AdaptiveNGram, ModelKind::Pcfg,
                 ModelKind::ChunkPcfg})
    if (name == to_string(k)) return k;
  if (name == "markov") return ModelKind::NGram;
  if (name == "chunk" || name == "ckl") return ModelKind::ChunkPcfg;
  throw ArgumentError("unknown model kind: " + std::string(name));
}

CandidateStream::CandidateStream(std::unique_ptr<CandidateSource> source)
    : source_(std::move(source)) {}

void CandidateStream::refill() {
  batch_.clear();
  pos_ = 0;
  if (exhausted_) return;
  std::optional<RawCandidate> first = std::move(lookahead_);
  lookahead_.reset();
  if (!first) first = source_->next();
  if (!first) {
    exhausted_ = true;
    return;
  }
  const double p = first->prob;
  batch_.push_back(std::move(*first));
  for (;;) {
    auto more = source_->next();
    if (!more) {
      exhausted_ = true;
      break;
    }
    if (more->prob == p) {
      batch_.push_back(std::move(*more));
    } else {
      lookahead_ = std::move(more);
      break;
    }
  }
  std::sort(batch_.begin(), batch_.end(),
            [](const RawCandidate& a, const RawCandidate& b) {
              return a.password < b.password;
            });
  max_batch_ = std::max(max_batch_, batch_.size());
}

std::optional<Candidate> CandidateStream::next() {
  if (pos_ == batch_.size()) refill();
  if (pos_ == batch_.size()) return std::nullopt;
  RawCandidate& raw = batch_[pos_++];
  return Candidate{++emitted_, std::move(raw.password), raw.prob};
}

std::vector<Candidate> CandidateStream::take(std::size_t g) {
  std::vector<Candidate> out;
  out.reserve(std::min<std::size_t>(g, 1u << 20));
  while (out.size() < g) {
    auto c = next();
    if (!c) break;
    out.push_back(std::move(*c));
  }
  return out;
}

namespace {

void validate(ModelKind kind, const ModelParams& p) {
  if (p.max_length == 0) throw ArgumentError("max_length must be positive");
  switch (kind) {
    case ModelKind::NGram:
    case ModelKind::AdaptiveNGram:
    case ModelKind::Backoff:
      if (p.order < 2 || p.order > markov::kMaxOrder)
        throw ArgumentError("markov order must be in [2, 8]");
      if (!(p.smoothing >= 0.0))
        throw ArgumentError("smoothing must be non-negative");
      if (kind == ModelKind::AdaptiveNGram && !(p.gamma >= 0.0 && p.gamma <= 1.0))
        throw ArgumentError("gamma must be in [0, 1]");
      break;
    case ModelKind::ChunkPcfg:
      if (p.vocab_size == 0) throw ArgumentError("vocab_size must be positive");
      break;
    case ModelKind::List:
    case ModelKind::Pcfg:
      break;
  }
}

}  // namespace

std::unique_ptr<PasswordModel> train(ModelKind kind,
                                     const PasswordCorpus& corpus,
                                     const ModelParams& params) {
  if (corpus.empty()) throw EmptyInputError("cannot train on an empty corpus");
  validate(kind, params);
  switch (kind) {
    case ModelKind::List:
      return ListModel::train(corpus, params);
    case ModelKind::NGram:
    case ModelKind::AdaptiveNGram:
    case ModelKind::Backoff:
      return MarkovModel::train(kind, corpus, params);
    case ModelKind::Pcfg:
    case ModelKind::ChunkPcfg:
      return GrammarModel::train(kind, corpus, params);
  }
  throw ArgumentError("unsupported model kind");
}

std::vector<Candidate> enumerate_top(const PasswordModel& model,
                                     std::size_t g) {
  return model.enumerate().take(g);
}

std::vector<Candidate> enumerate_top(const PasswordModel& model, std::size_t g,
                                     std::size_t max_length) {
  return model.enumerate(max_length).take(g);
}

std::size_t draw_from_cumulative(const std::vector<double>& cumulative,
                                 double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace psmaudit
