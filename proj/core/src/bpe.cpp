#include "psmaudit/bpe.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_set>

#include "psmaudit/error.hpp"

namespace psmaudit {

namespace {

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back('\0');
  key.append(right);
  return key;
}

}  // namespace

MergeTable::MergeTable(std::vector<char> alphabet,
                       std::vector<std::pair<std::string, std::string>> merges)
    : alphabet_(std::move(alphabet)), merges_(std::move(merges)) {
  for (std::size_t i = 0; i < merges_.size(); ++i)
    rank_.emplace(pair_key(merges_[i].first, merges_[i].second),
                  static_cast<std::uint32_t>(i));
}

std::vector<std::string> MergeTable::segment(std::string_view password) const {
  std::vector<std::string> chunks;
  chunks.reserve(password.size());
  for (char c : password) chunks.emplace_back(1, c);
  if (rank_.empty()) return chunks;
  // Repeatedly merge the lowest-ranked adjacent pair. A merge can only create
  // pairs of higher rank, so this replays training order exactly.
  for (;;) {
    std::uint32_t best = UINT32_MAX;
    for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
      auto it = rank_.find(pair_key(chunks[i], chunks[i + 1]));
      if (it != rank_.end() && it->second < best) best = it->second;
    }
    if (best == UINT32_MAX) break;
    const auto& [left, right] = merges_[best];
    std::vector<std::string> merged;
    merged.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (i + 1 < chunks.size() && chunks[i] == left && chunks[i + 1] == right) {
        merged.push_back(left + right);
        ++i;
      } else {
        merged.push_back(std::move(chunks[i]));
      }
    }
    chunks = std::move(merged);
  }
  return chunks;
}

MergeTable bpe_learn(const PasswordCorpus& corpus, std::size_t vocab_size,
                     std::uint64_t min_pair_count) {
  std::set<char> alpha_set;
  for (const auto& e : corpus.entries())
    alpha_set.insert(e.password.begin(), e.password.end());
  std::vector<char> alphabet(alpha_set.begin(), alpha_set.end());
  if (vocab_size < alphabet.size())
    throw ArgumentError("BPE vocabulary smaller than the corpus alphabet");

  // Token ids: alphabet first, then one id per merge.
  std::vector<std::string> token_text;
  std::unordered_map<char, int> char_id;
  for (char c : alphabet) {
    char_id.emplace(c, static_cast<int>(token_text.size()));
    token_text.emplace_back(1, c);
  }

  struct Word {
    std::vector<int> tokens;
    std::uint64_t count;
  };
  std::vector<Word> words;
  words.reserve(corpus.unique_size());
  for (const auto& e : corpus.entries()) {
    Word w{{}, e.count};
    for (char c : e.password) w.tokens.push_back(char_id.at(c));
    words.push_back(std::move(w));
  }

  using PairId = std::uint64_t;
  auto make_pair_id = [](int a, int b) {
    return (static_cast<PairId>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  std::unordered_map<PairId, std::uint64_t> pair_count;
  std::unordered_map<PairId, std::vector<std::uint32_t>> pair_words;

  auto add_word_pairs = [&](std::uint32_t wi, std::int64_t sign) {
    const auto& w = words[wi];
    for (std::size_t i = 0; i + 1 < w.tokens.size(); ++i) {
      PairId id = make_pair_id(w.tokens[i], w.tokens[i + 1]);
      auto& c = pair_count[id];
      if (sign > 0) {
        c += w.count;
        pair_words[id].push_back(wi);
      } else {
        c -= w.count;
      }
    }
  };
  for (std::uint32_t wi = 0; wi < words.size(); ++wi) add_word_pairs(wi, +1);

  // Max-heap on (count, then lexicographically smallest pair text). Entries
  // go stale when counts change and are re-validated on pop.
  struct HeapItem {
    std::uint64_t count;
    PairId id;
  };
  auto text_less = [&](PairId a, PairId b) {
    const auto& al = token_text[a >> 32];
    const auto& bl = token_text[b >> 32];
    if (al != bl) return al < bl;
    return token_text[a & 0xffffffffu] < token_text[b & 0xffffffffu];
  };
  auto heap_less = [&](const HeapItem& x, const HeapItem& y) {
    if (x.count != y.count) return x.count < y.count;
    return text_less(y.id, x.id);
  };
  std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(heap_less)>
      heap(heap_less);
  for (const auto& [id, c] : pair_count)
    if (c > 0) heap.push({c, id});

  std::vector<std::pair<std::string, std::string>> merges;
  const std::size_t max_merges = vocab_size - alphabet.size();
  while (merges.size() < max_merges && !heap.empty()) {
    HeapItem top = heap.top();
    heap.pop();
    auto it = pair_count.find(top.id);
    if (it == pair_count.end() || it->second != top.count) continue;
    if (top.count < std::max<std::uint64_t>(min_pair_count, 1)) break;

    const int left = static_cast<int>(top.id >> 32);
    const int right = static_cast<int>(top.id & 0xffffffffu);
    const int merged_id = static_cast<int>(token_text.size());
    token_text.push_back(token_text[left] + token_text[right]);
    merges.emplace_back(token_text[left], token_text[right]);

    std::vector<std::uint32_t> affected = std::move(pair_words[top.id]);
    pair_words.erase(top.id);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    std::unordered_set<PairId> touched;
    for (std::uint32_t wi : affected) {
      auto& tokens = words[wi].tokens;
      bool has = false;
      for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        if (tokens[i] == left && tokens[i + 1] == right) {
          has = true;
          break;
        }
      if (!has) continue;
      for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        touched.insert(make_pair_id(tokens[i], tokens[i + 1]));
      add_word_pairs(wi, -1);
      std::vector<int> out;
      out.reserve(tokens.size());
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i + 1 < tokens.size() && tokens[i] == left && tokens[i + 1] == right) {
          out.push_back(merged_id);
          ++i;
        } else {
          out.push_back(tokens[i]);
        }
      }
      tokens = std::move(out);
      add_word_pairs(wi, +1);
      for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        touched.insert(make_pair_id(tokens[i], tokens[i + 1]));
    }
    std::vector<PairId> ordered(touched.begin(), touched.end());
    std::sort(ordered.begin(), ordered.end());
    for (PairId id : ordered) {
      auto pc = pair_count.find(id);
      if (pc == pair_count.end()) continue;
      if (pc->second == 0) {
        pair_count.erase(pc);
        pair_words.erase(id);
      } else {
        heap.push({pc->second, id});
      }
    }
  }
  return MergeTable(std::move(alphabet), std::move(merges));
}

}  // namespace psmaudit
