#include <algorithm>
#include <cctype>
#include <map>

#include "binary_io.hpp"
#include "models_impl.hpp"
#include "psmaudit/error.hpp"

namespace psmaudit {

namespace {

char char_class(char c) {
  auto u = static_cast<unsigned char>(c);
  if (std::isalpha(u)) return 'L';
  if (std::isdigit(u)) return 'D';
  return 'S';
}

// Maximal same-class runs: "abc12!" -> ["abc", "12", "!"].
std::vector<std::string> class_runs(std::string_view pw) {
  std::vector<std::string> runs;
  for (std::size_t i = 0; i < pw.size();) {
    std::size_t j = i + 1;
    while (j < pw.size() && char_class(pw[j]) == char_class(pw[i])) ++j;
    runs.emplace_back(pw.substr(i, j - i));
    i = j;
  }
  return runs;
}

}  // namespace

struct GrammarModel::Counts {
  std::vector<std::string> labels;
  // Per label: terminal text -> count.
  std::vector<std::map<std::string, std::uint64_t>> terminals;
  // Template label sequence -> count.
  std::map<std::vector<std::uint32_t>, std::uint64_t> templates;
};

std::string GrammarModel::label_of(std::string_view segment) {
  char cls = segment.empty() ? 'S' : char_class(segment.front());
  bool mixed = false;
  for (char c : segment)
    if (char_class(c) != cls) mixed = true;
  std::string label = mixed ? std::string("DM") : std::string(1, cls);
  label += std::to_string(segment.size());
  return label;
}

std::vector<std::string> GrammarModel::segment(std::string_view password) const {
  if (chunked_) return merges_.segment(password);
  return class_runs(password);
}

GrammarModel::GrammarModel(ModelInfo info, MergeTable merges, Counts counts)
    : PasswordModel(std::move(info)), merges_(std::move(merges)) {
  chunked_ = info_.kind == ModelKind::ChunkPcfg;
  label_names_ = std::move(counts.labels);
  for (std::uint32_t i = 0; i < label_names_.size(); ++i)
    label_index_.emplace(label_names_[i], i);

  tables_.resize(label_names_.size());
  for (std::size_t l = 0; l < tables_.size(); ++l) {
    Table& t = tables_[l];
    for (const auto& [text, n] : counts.terminals[l]) {
      t.items.push_back({text, n, 0.0});
      t.total += n;
    }
    for (auto& item : t.items)
      item.prob = static_cast<double>(item.count) / static_cast<double>(t.total);
    std::sort(t.items.begin(), t.items.end(),
              [](const Terminal& a, const Terminal& b) {
                if (a.count != b.count) return a.count > b.count;
                return a.text < b.text;
              });
    double acc = 0.0;
    for (std::uint32_t i = 0; i < t.items.size(); ++i) {
      t.index.emplace(t.items[i].text, i);
      acc += t.items[i].prob;
      t.cumulative.push_back(acc);
    }
  }

  std::uint64_t total = 0;
  for (const auto& [labels, n] : counts.templates) total += n;
  for (const auto& [labels, n] : counts.templates) {
    Template t;
    t.labels = labels;
    t.count = n;
    t.prob = static_cast<double>(n) / static_cast<double>(total);
    for (auto l : labels) {
      t.key += label_names_[l];
      t.length += tables_[l].items.empty() ? 0 : tables_[l].items.front().text.size();
    }
    templates_.push_back(std::move(t));
  }
  std::sort(templates_.begin(), templates_.end(),
            [](const Template& a, const Template& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.key < b.key;
            });
  double acc = 0.0;
  for (std::uint32_t i = 0; i < templates_.size(); ++i) {
    template_index_.emplace(templates_[i].key, i);
    acc += templates_[i].prob;
    template_cumulative_.push_back(acc);
  }
}

std::unique_ptr<GrammarModel> GrammarModel::train(ModelKind kind,
                                                  const PasswordCorpus& corpus,
                                                  const ModelParams& params) {
  MergeTable merges;
  const bool chunked = kind == ModelKind::ChunkPcfg;
  if (chunked) merges = bpe_learn(corpus, params.vocab_size, params.min_merge_count);

  Counts counts;
  std::unordered_map<std::string, std::uint32_t> ids;
  for (const auto& e : corpus.entries()) {
    auto segs = chunked ? merges.segment(e.password) : class_runs(e.password);
    std::vector<std::uint32_t> labels;
    for (const auto& s : segs) {
      std::string name = label_of(s);
      auto [it, fresh] = ids.emplace(name, static_cast<std::uint32_t>(counts.labels.size()));
      if (fresh) {
        counts.labels.push_back(name);
        counts.terminals.emplace_back();
      }
      labels.push_back(it->second);
      counts.terminals[it->second][s] += e.count;
    }
    counts.templates[labels] += e.count;
  }

  ModelInfo info{kind, params, corpus.fingerprint(), corpus.total(),
                 corpus.unique_size(), corpus.source_label()};
  return std::unique_ptr<GrammarModel>(
      new GrammarModel(std::move(info), std::move(merges), std::move(counts)));
}

std::unique_ptr<GrammarModel> GrammarModel::read(ModelInfo info,
                                                 BinaryReader& in) {
  MergeTable merges;
  if (info.kind == ModelKind::ChunkPcfg) {
    std::string alpha = in.str();
    std::size_t n = in.count(8);
    std::vector<std::pair<std::string, std::string>> m;
    m.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string a = in.str();
      std::string b = in.str();
      m.emplace_back(std::move(a), std::move(b));
    }
    merges = MergeTable(std::vector<char>(alpha.begin(), alpha.end()), std::move(m));
  }
  Counts counts;
  std::size_t nlabels = in.count(4);
  for (std::size_t i = 0; i < nlabels; ++i) counts.labels.push_back(in.str());
  counts.terminals.resize(nlabels);
  for (std::size_t l = 0; l < nlabels; ++l) {
    std::size_t n = in.count(12);
    for (std::size_t i = 0; i < n; ++i) {
      std::string text = in.str();
      std::uint64_t c = in.u64();
      if (c == 0) throw DecodeError("grammar: zero terminal count");
      counts.terminals[l][std::move(text)] = c;
    }
  }
  std::size_t ntemplates = in.count(12);
  for (std::size_t i = 0; i < ntemplates; ++i) {
    std::size_t n = in.count(4);
    std::vector<std::uint32_t> labels(n);
    for (auto& l : labels) {
      l = in.u32();
      if (l >= nlabels || counts.terminals[l].empty())
        throw DecodeError("grammar: template references unknown label");
    }
    std::uint64_t c = in.u64();
    if (c == 0) throw DecodeError("grammar: zero template count");
    counts.templates[std::move(labels)] = c;
  }
  return std::unique_ptr<GrammarModel>(
      new GrammarModel(std::move(info), std::move(merges), std::move(counts)));
}

void GrammarModel::write_payload(BinaryWriter& out) const {
  if (chunked_) {
    out.str(std::string(merges_.alphabet().begin(), merges_.alphabet().end()));
    out.u64(merges_.merges().size());
    for (const auto& [a, b] : merges_.merges()) {
      out.str(a);
      out.str(b);
    }
  }
  out.u64(label_names_.size());
  for (const auto& l : label_names_) out.str(l);
  for (const auto& t : tables_) {
    std::vector<const Terminal*> sorted;
    for (const auto& item : t.items) sorted.push_back(&item);
    std::sort(sorted.begin(), sorted.end(),
              [](auto* a, auto* b) { return a->text < b->text; });
    out.u64(sorted.size());
    for (const auto* item : sorted) {
      out.str(item->text);
      out.u64(item->count);
    }
  }
  std::vector<const Template*> sorted;
  for (const auto& t : templates_) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->labels < b->labels; });
  out.u64(sorted.size());
  for (const auto* t : sorted) {
    out.u64(t->labels.size());
    for (auto l : t->labels) out.u32(l);
    out.u64(t->count);
  }
}

std::vector<double> GrammarModel::token_probs(std::string_view password) const {
  if (password.empty()) return {};
  auto segs = segment(password);
  std::string key;
  std::vector<std::uint32_t> labels;
  for (const auto& s : segs) {
    std::string name = label_of(s);
    auto it = label_index_.find(name);
    if (it == label_index_.end()) return {};
    labels.push_back(it->second);
    key += name;
  }
  auto t = template_index_.find(key);
  if (t == template_index_.end()) return {};
  std::vector<double> out{templates_[t->second].prob};
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Table& table = tables_[labels[i]];
    auto it = table.index.find(segs[i]);
    if (it == table.index.end()) return {};
    out.push_back(table.items[it->second].prob);
  }
  return out;
}

double GrammarModel::prob(std::string_view password) const {
  auto factors = token_probs(password);
  if (factors.empty()) return 0.0;
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

namespace {

// Best-first over (template, terminal index vector). Successors bump one
// index at or after the parent's pivot, which reaches every combination
// exactly once; terminal tables are sorted by probability so successors never
// exceed their parent.
class GrammarSource final : public CandidateSource {
 public:
  GrammarSource(const GrammarModel& m, std::size_t max_length)
      : m_(m) {
    const auto& templates = m_.templates();
    for (std::uint32_t t = 0; t < templates.size(); ++t) {
      if (templates[t].length > max_length || templates[t].length == 0) continue;
      push(t, std::vector<std::uint32_t>(templates[t].labels.size(), 0), 0);
    }
  }

  std::optional<RawCandidate> next() override {
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), Less{});
      Entry e = std::move(heap_.back());
      heap_.pop_back();

      const auto& tmpl = m_.templates()[e.tmpl];
      for (std::uint32_t i = e.pivot; i < e.idx.size(); ++i) {
        if (e.idx[i] + 1 < m_.tables()[tmpl.labels[i]].items.size()) {
          auto idx = e.idx;
          ++idx[i];
          push(e.tmpl, std::move(idx), i);
        }
      }

      std::string pw;
      std::vector<std::string_view> parts;
      for (std::size_t i = 0; i < e.idx.size(); ++i) {
        const auto& text = m_.tables()[tmpl.labels[i]].items[e.idx[i]].text;
        pw += text;
        parts.push_back(text);
      }
      if (m_.chunked()) {
        // Only the derivation that segment() reproduces defines prob(pw).
        auto canon = m_.segment(pw);
        if (!std::equal(canon.begin(), canon.end(), parts.begin(), parts.end()))
          continue;
      }
      return RawCandidate{std::move(pw), e.prob};
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    double prob;
    std::uint32_t tmpl;
    std::vector<std::uint32_t> idx;
    std::uint32_t pivot;
  };
  struct Less {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.prob < b.prob;
    }
  };

  void push(std::uint32_t t, std::vector<std::uint32_t> idx, std::uint32_t pivot) {
    const auto& tmpl = m_.templates()[t];
    double p = tmpl.prob;
    for (std::size_t i = 0; i < idx.size(); ++i)
      p *= m_.tables()[tmpl.labels[i]].items[idx[i]].prob;
    heap_.push_back({p, t, std::move(idx), pivot});
    std::push_heap(heap_.begin(), heap_.end(), Less{});
  }

  const GrammarModel& m_;
  std::vector<Entry> heap_;
};

}  // namespace

CandidateStream GrammarModel::enumerate(std::size_t max_length) const {
  return CandidateStream(std::make_unique<GrammarSource>(*this, max_length));
}

std::optional<Sample> GrammarModel::sample(Rng& rng) const {
  const auto& tmpl = templates_[draw_from_cumulative(template_cumulative_, rng.uniform())];
  std::string pw;
  std::vector<std::string_view> parts;
  double p = tmpl.prob;
  for (auto l : tmpl.labels) {
    const Table& table = tables_[l];
    const auto& item = table.items[draw_from_cumulative(table.cumulative, rng.uniform())];
    p *= item.prob;
    pw += item.text;
    parts.push_back(item.text);
  }
  if (chunked_) {
    auto canon = merges_.segment(pw);
    if (!std::equal(canon.begin(), canon.end(), parts.begin(), parts.end()))
      return std::nullopt;
  }
  return Sample{std::move(pw), p};
}

}  // namespace psmaudit
