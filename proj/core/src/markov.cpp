#include <algorithm>
#include <queue>

#include "binary_io.hpp"
#include "models_impl.hpp"
#include "psmaudit/error.hpp"

namespace psmaudit {

namespace markov {

std::uint64_t context_key(std::string_view symbols) {
  std::uint64_t key = static_cast<std::uint64_t>(symbols.size()) << 49;
  for (std::size_t i = 0; i < symbols.size(); ++i)
    key |= static_cast<std::uint64_t>(static_cast<unsigned char>(symbols[i]) &
                                      0x7f)
           << (7 * i);
  return key;
}

}  // namespace markov

using markov::kEnd;
using markov::kStart;
using markov::Transition;

struct MarkovModel::Counts {
  // Sorted by key; transitions in any order.
  std::vector<std::pair<std::uint64_t, std::vector<Transition>>> rows;
};

namespace {

// The last `len` symbols of the start-padded prefix.
std::string padded_context(std::string_view prefix, int len) {
  std::string ctx(static_cast<std::size_t>(len), static_cast<char>(kStart));
  const auto n = static_cast<std::ptrdiff_t>(prefix.size());
  for (int j = 0; j < len; ++j) {
    std::ptrdiff_t pos = n - len + j;
    if (pos >= 0) ctx[static_cast<std::size_t>(j)] = prefix[static_cast<std::size_t>(pos)];
  }
  return ctx;
}

}  // namespace

MarkovModel::MarkovModel(ModelInfo info, std::vector<std::uint8_t> alphabet,
                         const Counts& counts)
    : PasswordModel(std::move(info)), alphabet_(std::move(alphabet)) {
  const auto& p = info_.params;
  backoff_ = info_.kind == ModelKind::Backoff;
  context_len_ = p.order - 1;
  threshold_ = p.backoff_threshold;
  k_ = p.smoothing;
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()),
                  alphabet_.end());
  for (auto s : alphabet_) alphabet_bits_.set(s);

  rows_.reserve(counts.rows.size());
  row_index_.reserve(counts.rows.size());
  for (const auto& [key, trans] : counts.rows) {
    Row row;
    row.key = key;
    row.begin = static_cast<std::uint32_t>(transitions_.size());
    row.size = static_cast<std::uint32_t>(trans.size());
    std::vector<Transition> sorted = trans;
    std::sort(sorted.begin(), sorted.end(),
              [](const Transition& a, const Transition& b) {
                if (a.count != b.count) return a.count > b.count;
                return a.symbol < b.symbol;
              });
    for (const auto& t : sorted) {
      row.total += t.count;
      transitions_.push_back(t);
    }
    row_index_.emplace(key, static_cast<std::uint32_t>(rows_.size()));
    rows_.push_back(row);
  }
}

std::unique_ptr<MarkovModel> MarkovModel::train(ModelKind kind,
                                                const PasswordCorpus& corpus,
                                                const ModelParams& params) {
  const int len = params.order - 1;
  const bool backoff = kind == ModelKind::Backoff;
  const double gamma = kind == ModelKind::AdaptiveNGram ? params.gamma : 0.0;
  Rng noise(derive_seed(params.seed, "adaptive-noise"));

  std::unordered_map<std::uint64_t, std::uint64_t> acc;  // key<<7 | symbol
  std::bitset<128> seen_chars;
  auto add = [&](std::string_view ctx, std::uint8_t sym, std::uint64_t c) {
    std::uint64_t n = c;
    if (gamma > 0.0)
      for (std::uint64_t j = 0; j < c; ++j)
        if (noise.bernoulli(gamma)) ++n;
    acc[(markov::context_key(ctx) << 7) | sym] += n;
  };

  for (const auto& e : corpus.entries()) {
    std::string padded(static_cast<std::size_t>(len), static_cast<char>(kStart));
    padded += e.password;
    for (unsigned char ch : e.password) seen_chars.set(ch);
    const std::string_view pv(padded);
    for (std::size_t i = 0; i <= e.password.size(); ++i) {
      const std::uint8_t sym =
          i < e.password.size() ? static_cast<std::uint8_t>(e.password[i]) : kEnd;
      const std::size_t hist_end = static_cast<std::size_t>(len) + i;
      if (!backoff) {
        add(pv.substr(i, static_cast<std::size_t>(len)), sym, e.count);
      } else {
        for (int l = 0; l <= len; ++l)
          add(pv.substr(hist_end - static_cast<std::size_t>(l),
                        static_cast<std::size_t>(l)),
              sym, e.count);
      }
    }
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> flat(acc.begin(), acc.end());
  std::sort(flat.begin(), flat.end());
  Counts counts;
  for (const auto& [k, n] : flat) {
    const std::uint64_t key = k >> 7;
    const auto sym = static_cast<std::uint8_t>(k & 0x7f);
    if (counts.rows.empty() || counts.rows.back().first != key)
      counts.rows.push_back({key, {}});
    counts.rows.back().second.push_back({sym, n});
  }

  std::vector<std::uint8_t> alphabet{kEnd};
  for (unsigned c = 0; c < 128; ++c)
    if (seen_chars[c]) alphabet.push_back(static_cast<std::uint8_t>(c));

  ModelInfo info{kind, params, corpus.fingerprint(), corpus.total(),
                 corpus.unique_size(), corpus.source_label()};
  return std::unique_ptr<MarkovModel>(
      new MarkovModel(std::move(info), std::move(alphabet), counts));
}

std::unique_ptr<MarkovModel> MarkovModel::read(ModelInfo info,
                                               BinaryReader& in) {
  std::string alpha = in.str();
  std::vector<std::uint8_t> alphabet(alpha.begin(), alpha.end());
  for (auto s : alphabet)
    if (s >= 128 || s == kStart) throw DecodeError("markov: bad alphabet");
  std::size_t nrows = in.count(20);
  Counts counts;
  counts.rows.reserve(nrows);
  for (std::size_t r = 0; r < nrows; ++r) {
    std::uint64_t key = in.u64();
    if ((key >> 49) >= static_cast<std::uint64_t>(markov::kMaxOrder))
      throw DecodeError("markov: bad context key");
    std::size_t n = in.count(9);
    std::vector<Transition> trans(n);
    for (auto& t : trans) {
      t.symbol = in.u8();
      t.count = in.u64();
    }
    counts.rows.push_back({key, std::move(trans)});
  }
  if (info.params.order < 2 || info.params.order > markov::kMaxOrder)
    throw DecodeError("markov: bad order");
  return std::unique_ptr<MarkovModel>(
      new MarkovModel(std::move(info), std::move(alphabet), counts));
}

void MarkovModel::write_payload(BinaryWriter& out) const {
  out.str(std::string(alphabet_.begin(), alphabet_.end()));
  std::vector<const Row*> sorted;
  sorted.reserve(rows_.size());
  for (const auto& r : rows_) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const Row* a, const Row* b) { return a->key < b->key; });
  out.u64(sorted.size());
  for (const Row* r : sorted) {
    out.u64(r->key);
    out.u64(r->size);
    for (const auto& t : transitions(r)) {
      out.u8(t.symbol);
      out.u64(t.count);
    }
  }
}

const MarkovModel::Row* MarkovModel::context_row(std::string_view prefix) const {
  auto find = [&](int l) -> const Row* {
    auto it = row_index_.find(markov::context_key(padded_context(prefix, l)));
    return it == row_index_.end() ? nullptr : &rows_[it->second];
  };
  if (!backoff_) return find(context_len_);
  for (int l = context_len_; l >= 1; --l) {
    const Row* row = find(l);
    if (row && row->total >= threshold_) return row;
  }
  return find(0);
}

std::span<const Transition> MarkovModel::transitions(const Row* row) const {
  if (!row) return {};
  return {transitions_.data() + row->begin, row->size};
}

double MarkovModel::cond(const Row* row, std::uint8_t symbol) const {
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  if (row) {
    total = row->total;
    for (const auto& t : transitions(row))
      if (t.symbol == symbol) {
        count = t.count;
        break;
      }
  }
  const double denom = static_cast<double>(total) +
                       k_ * static_cast<double>(alphabet_.size());
  if (denom <= 0.0) return 0.0;
  return (static_cast<double>(count) + k_) / denom;
}

std::uint64_t MarkovModel::transition_count(std::string_view context,
                                            std::uint8_t symbol) const {
  auto it = row_index_.find(markov::context_key(context));
  if (it == row_index_.end()) return 0;
  for (const auto& t : transitions(&rows_[it->second]))
    if (t.symbol == symbol) return t.count;
  return 0;
}

std::vector<double> MarkovModel::token_probs(std::string_view password) const {
  for (unsigned char c : password)
    if (!in_alphabet(c) || c == kEnd) return {};
  std::vector<double> out;
  out.reserve(password.size() + 1);
  for (std::size_t i = 0; i < password.size(); ++i)
    out.push_back(cond(context_row(password.substr(0, i)),
                       static_cast<std::uint8_t>(password[i])));
  out.push_back(cond(context_row(password), kEnd));
  return out;
}

double MarkovModel::prob(std::string_view password) const {
  auto factors = token_probs(password);
  if (factors.empty()) return 0.0;
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

namespace {

// Lazy best-first search over prefixes. Each queue entry stands for "child
// `cursor` of `prefix`"; popping it pushes the next sibling and, for a
// character child, the first child of the extended prefix. Children of a row
// are visited seen-symbols-first (count desc) and then unseen alphabet
// symbols, so sibling probabilities never increase and the queue holds at
// most two entries per pop.
class MarkovSource final : public CandidateSource {
 public:
  MarkovSource(const MarkovModel& m, std::size_t max_length)
      : m_(m), max_length_(max_length) {
    const auto* row = m_.context_row({});
    if (auto c = next_valid(row, 0, false, max_length_ > 0))
      push(1.0, row, std::string(), *c);
  }

  std::optional<RawCandidate> next() override {
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), Less{});
      Entry e = std::move(heap_.back());
      heap_.pop_back();

      const std::uint8_t sym = symbol_at(e.row, e.cursor);
      const bool allow_end = !e.prefix.empty();
      const bool allow_chars = e.prefix.size() < max_length_;
      if (auto c = next_valid(e.row, e.cursor + 1, allow_end, allow_chars))
        push(e.prefix_prob, e.row, e.prefix, *c);

      if (sym == kEnd) return RawCandidate{std::move(e.prefix), e.prob};

      std::string extended = std::move(e.prefix);
      extended.push_back(static_cast<char>(sym));
      const auto* row = m_.context_row(extended);
      const bool chars = extended.size() < max_length_;
      if (auto c = next_valid(row, 0, true, chars))
        push(e.prob, row, std::move(extended), *c);
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    double prob;
    double prefix_prob;
    const MarkovModel::Row* row;
    std::string prefix;
    std::uint32_t cursor;
  };
  struct Less {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.prob < b.prob;
    }
  };

  std::uint8_t symbol_at(const MarkovModel::Row* row, std::uint32_t cursor) const {
    auto seen = m_.transitions(row);
    if (cursor < seen.size()) return seen[cursor].symbol;
    return m_.alphabet()[cursor - seen.size()];
  }

  std::optional<std::uint32_t> next_valid(const MarkovModel::Row* row,
                                          std::uint32_t cursor, bool allow_end,
                                          bool allow_chars) const {
    auto seen = m_.transitions(row);
    auto allowed = [&](std::uint8_t s) {
      return s == kEnd ? allow_end : allow_chars;
    };
    for (; cursor < seen.size(); ++cursor)
      if (allowed(seen[cursor].symbol) && m_.cond(row, seen[cursor].symbol) > 0.0)
        return cursor;
    if (m_.smoothing() <= 0.0) return std::nullopt;
    std::bitset<128> in_row;
    for (const auto& t : seen) in_row.set(t.symbol);
    const auto& alpha = m_.alphabet();
    for (std::size_t u = cursor - seen.size(); u < alpha.size(); ++u) {
      std::uint8_t s = alpha[u];
      if (in_row[s] || !allowed(s)) continue;
      return static_cast<std::uint32_t>(seen.size() + u);
    }
    return std::nullopt;
  }

  void push(double prefix_prob, const MarkovModel::Row* row, std::string prefix,
            std::uint32_t cursor) {
    const double p = prefix_prob * m_.cond(row, symbol_at(row, cursor));
    heap_.push_back({p, prefix_prob, row, std::move(prefix), cursor});
    std::push_heap(heap_.begin(), heap_.end(), Less{});
  }

  const MarkovModel& m_;
  std::size_t max_length_;
  std::vector<Entry> heap_;
};

}  // namespace

CandidateStream MarkovModel::enumerate(std::size_t max_length) const {
  return CandidateStream(std::make_unique<MarkovSource>(*this, max_length));
}

std::optional<Sample> MarkovModel::sample(Rng& rng) const {
  constexpr std::size_t kMaxSampleLength = 256;
  std::string s;
  double p = 1.0;
  for (;;) {
    const Row* row = context_row(s);
    auto seen = transitions(row);
    const double u = rng.uniform();
    double acc = 0.0;
    std::uint8_t pick = 0;
    bool picked = false;
    for (const auto& t : seen) {
      acc += cond(row, t.symbol);
      if (u < acc) {
        pick = t.symbol;
        picked = true;
        break;
      }
    }
    if (!picked) {
      std::bitset<128> in_row;
      for (const auto& t : seen) in_row.set(t.symbol);
      std::vector<std::uint8_t> unseen;
      for (auto a : alphabet_)
        if (!in_row[a]) unseen.push_back(a);
      if (unseen.empty() || k_ <= 0.0) {
        if (seen.empty()) return std::nullopt;
        pick = seen.back().symbol;  // rounding slack
      } else {
        const double each = cond(row, unseen.front());
        auto idx = static_cast<std::size_t>((u - acc) / each);
        pick = unseen[std::min(idx, unseen.size() - 1)];
      }
    }
    p *= cond(row, pick);
    if (pick == kEnd) break;
    s.push_back(static_cast<char>(pick));
    if (s.size() > kMaxSampleLength) return std::nullopt;
  }
  return Sample{std::move(s), p};
}

}  // namespace psmaudit
