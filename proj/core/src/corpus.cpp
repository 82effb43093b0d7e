#include "psmaudit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "psmaudit/error.hpp"
#include "psmaudit/rng.hpp"

namespace psmaudit {

namespace {

// Reads newline-delimited records as raw bytes, stripping a trailing CR.
template <typename Fn>
std::uint64_t for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++n;
    fn(line);
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return n;
}

}  // namespace

bool is_clean_password(std::string_view pw, std::size_t max_len) {
  if (pw.empty() || pw.size() > max_len) return false;
  return std::all_of(pw.begin(), pw.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u >= 0x20 && u <= 0x7e;
  });
}

PasswordCorpus::PasswordCorpus(const PasswordCorpus& other)
    : entries_(other.entries_), total_(other.total_), label_(other.label_) {
  build_index();
}

PasswordCorpus& PasswordCorpus::operator=(const PasswordCorpus& other) {
  if (this != &other) {
    entries_ = other.entries_;
    total_ = other.total_;
    label_ = other.label_;
    build_index();
  }
  return *this;
}

void PasswordCorpus::build_index() {
  index_.clear();
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    index_.emplace(entries_[i].password, i);
}

PasswordCorpus PasswordCorpus::from_counts(
    const std::unordered_map<std::string, std::uint64_t>& counts,
    std::string source_label, std::size_t max_len) {
  PasswordCorpus c;
  c.label_ = std::move(source_label);
  c.entries_.reserve(counts.size());
  for (const auto& [pw, n] : counts) {
    if (n == 0) throw ArgumentError("zero count for corpus entry");
    if (!is_clean_password(pw, max_len))
      throw ArgumentError("unclean password in corpus");
    c.entries_.push_back({pw, n});
    c.total_ += n;
  }
  std::sort(c.entries_.begin(), c.entries_.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) {
              return a.password < b.password;
            });
  c.build_index();
  return c;
}

PasswordCorpus PasswordCorpus::from_passwords(
    const std::vector<std::string>& passwords, std::string source_label,
    std::size_t max_len) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& pw : passwords) ++counts[pw];
  return from_counts(counts, std::move(source_label), max_len);
}

std::uint64_t PasswordCorpus::count(std::string_view pw) const {
  auto it = index_.find(pw);
  return it == index_.end() ? 0 : entries_[it->second].count;
}

std::vector<CorpusEntry> PasswordCorpus::by_frequency() const {
  std::vector<CorpusEntry> out = entries_;
  std::stable_sort(out.begin(), out.end(),
                   [](const CorpusEntry& a, const CorpusEntry& b) {
                     return a.count > b.count;
                   });
  return out;
}

std::uint64_t PasswordCorpus::fingerprint() const {
  Fnv1a h;
  for (const auto& e : entries_) {
    h.update(e.password);
    h.update(std::string_view("\0", 1));
    h.update_u64(e.count);
  }
  return h.digest();
}

PasswordCorpus load_corpus(const std::filesystem::path& path,
                           std::size_t max_len, CorpusLoadStats* stats) {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t dropped = 0;
  std::uint64_t lines = for_each_line(path, [&](const std::string& line) {
    if (is_clean_password(line, max_len))
      ++counts[line];
    else
      ++dropped;
  });
  if (stats) *stats = {lines, dropped};
  if (counts.empty())
    throw EmptyInputError("no usable passwords in " + path.string());
  return PasswordCorpus::from_counts(counts, path.filename().string(), max_len);
}

void write_corpus(const PasswordCorpus& corpus,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& e : corpus.entries())
    for (std::uint64_t i = 0; i < e.count; ++i) out << e.password << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

SplitPair split_shadow(const PasswordCorpus& corpus, std::uint64_t seed) {
  if (corpus.unique_size() < 2)
    throw ArgumentError("split needs at least 2 unique passwords");
  std::vector<std::size_t> order(corpus.unique_size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::unordered_map<std::string, std::uint64_t> train, test;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& e = corpus.entries()[order[i]];
    (i % 2 == 0 ? train : test).emplace(e.password, e.count);
  }
  const std::string& label = corpus.source_label();
  return {PasswordCorpus::from_counts(train, label + "#train"),
          PasswordCorpus::from_counts(test, label + "#test"), seed};
}

bool AccountStore::add(std::string_view email, std::string_view password,
                       std::size_t max_len) {
  if (!is_clean_password(password, max_len)) return false;
  std::string key(email);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  accounts_[key].emplace(password);
  return true;
}

std::uint64_t AccountStore::password_count() const {
  std::uint64_t n = 0;
  for (const auto& [email, pws] : accounts_) n += pws.size();
  return n;
}

double AccountStore::mean_passwords_per_user() const {
  if (accounts_.empty()) return 0.0;
  return static_cast<double>(password_count()) /
         static_cast<double>(accounts_.size());
}

AccountStore load_accounts(const std::filesystem::path& path, char separator,
                           AccountLoadStats* stats, std::size_t max_len) {
  AccountStore store;
  AccountLoadStats st;
  st.lines_read = for_each_line(path, [&](const std::string& line) {
    auto pos = line.find(separator);
    if (pos == std::string::npos || pos == 0) {
      ++st.malformed;
      return;
    }
    if (!store.add(std::string_view(line).substr(0, pos),
                   std::string_view(line).substr(pos + 1), max_len))
      ++st.dropped;
  });
  if (stats) *stats = st;
  if (store.size() == 0)
    throw EmptyInputError("no accounts in " + path.string());
  return store;
}

Blocklist::Blocklist(std::vector<std::string> passwords, std::string name)
    : name_(std::move(name)) {
  passwords_.reserve(passwords.size());
  for (auto& pw : passwords)
    if (members_.insert(pw).second) passwords_.push_back(std::move(pw));
}

bool Blocklist::contains(std::string_view pw) const {
  return members_.count(std::string(pw)) > 0;
}

Blocklist load_blocklist(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for_each_line(path, [&](const std::string& line) {
    if (!line.empty()) lines.push_back(line);
  });
  if (lines.empty())
    throw EmptyInputError("empty blocklist: " + path.string());
  return Blocklist(std::move(lines), path.stem().string());
}

OverlapResult overlap_ratio(const std::vector<std::string>& list_a,
                            const std::vector<std::string>& list_b,
                            std::size_t k, bool allow_truncation) {
  if (k == 0) throw ArgumentError("overlap k must be positive");
  OverlapResult r;
  r.k = k;
  r.truncated = list_a.size() < k || list_b.size() < k;
  if (r.truncated && !allow_truncation)
    throw ArgumentError("overlap k exceeds list length");
  const std::size_t na = std::min(k, list_a.size());
  const std::size_t nb = std::min(k, list_b.size());
  std::unordered_set<std::string_view> top_a(list_a.begin(),
                                             list_a.begin() + na);
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < nb; ++i)
    if (top_a.count(list_b[i]) && seen.insert(list_b[i]).second)
      ++r.intersection;
  r.ratio = static_cast<double>(r.intersection) / static_cast<double>(k);
  return r;
}

}  // namespace psmaudit
