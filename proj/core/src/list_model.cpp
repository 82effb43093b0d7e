#include <algorithm>

#include "binary_io.hpp"
#include "models_impl.hpp"

namespace psmaudit {

namespace {

class ListSource final : public CandidateSource {
 public:
  ListSource(const std::vector<CorpusEntry>& ranked, std::uint64_t total,
             std::size_t max_length)
      : ranked_(ranked), total_(total), max_length_(max_length) {}

  std::optional<RawCandidate> next() override {
    while (pos_ < ranked_.size()) {
      const auto& e = ranked_[pos_++];
      if (e.password.size() > max_length_) continue;
      return RawCandidate{e.password, static_cast<double>(e.count) /
                                          static_cast<double>(total_)};
    }
    return std::nullopt;
  }

 private:
  const std::vector<CorpusEntry>& ranked_;
  std::uint64_t total_;
  std::size_t max_length_;
  std::size_t pos_ = 0;
};

}  // namespace

ListModel::ListModel(ModelInfo info, std::vector<CorpusEntry> entries)
    : PasswordModel(std::move(info)), ranked_(std::move(entries)) {
  std::sort(ranked_.begin(), ranked_.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.password < b.password;
            });
  counts_.reserve(ranked_.size());
  cumulative_.reserve(ranked_.size());
  for (const auto& e : ranked_) {
    counts_.emplace(e.password, e.count);
    total_ += e.count;
    cumulative_.push_back(total_);
  }
}

std::unique_ptr<ListModel> ListModel::train(const PasswordCorpus& corpus,
                                            const ModelParams& params) {
  ModelInfo info{ModelKind::List, params, corpus.fingerprint(), corpus.total(),
                 corpus.unique_size(), corpus.source_label()};
  return std::unique_ptr<ListModel>(new ListModel(std::move(info),
                                                  corpus.entries()));
}

std::unique_ptr<ListModel> ListModel::read(ModelInfo info, BinaryReader& in) {
  std::size_t n = in.count(12);
  std::vector<CorpusEntry> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CorpusEntry e;
    e.password = in.str();
    e.count = in.u64();
    if (e.count == 0) throw DecodeError("list model: zero count");
    entries.push_back(std::move(e));
  }
  return std::unique_ptr<ListModel>(new ListModel(std::move(info),
                                                  std::move(entries)));
}

void ListModel::write_payload(BinaryWriter& out) const {
  std::vector<const CorpusEntry*> sorted;
  sorted.reserve(ranked_.size());
  for (const auto& e : ranked_) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->password < b->password; });
  out.u64(sorted.size());
  for (const auto* e : sorted) {
    out.str(e->password);
    out.u64(e->count);
  }
}

double ListModel::prob(std::string_view password) const {
  auto it = counts_.find(std::string(password));
  if (it == counts_.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_);
}

std::vector<double> ListModel::token_probs(std::string_view password) const {
  double p = prob(password);
  if (p == 0.0) return {};
  return {p};
}

CandidateStream ListModel::enumerate(std::size_t max_length) const {
  return CandidateStream(
      std::make_unique<ListSource>(ranked_, total_, max_length));
}

std::optional<Sample> ListModel::sample(Rng& rng) const {
  std::uint64_t u = rng.below(total_);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto& e = ranked_[static_cast<std::size_t>(it - cumulative_.begin())];
  return Sample{e.password,
                static_cast<double>(e.count) / static_cast<double>(total_)};
}

}  // namespace psmaudit
