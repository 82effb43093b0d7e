#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace psmaudit {

inline constexpr std::size_t kDefaultMaxPasswordLength = 30;

// Printable ASCII (0x20-0x7E), length 1..max_len. Whitespace is kept as-is.
bool is_clean_password(std::string_view pw,
                       std::size_t max_len = kDefaultMaxPasswordLength);

struct CorpusEntry {
  std::string password;
  std::uint64_t count = 0;
};

// Multiset of cleaned passwords. Entries are kept sorted by password so that
// iteration order (and everything derived from it) is reproducible.
class PasswordCorpus {
 public:
  PasswordCorpus() = default;
  PasswordCorpus(const PasswordCorpus& other);
  PasswordCorpus& operator=(const PasswordCorpus& other);
  PasswordCorpus(PasswordCorpus&&) noexcept = default;
  PasswordCorpus& operator=(PasswordCorpus&&) noexcept = default;

  // Throws ArgumentError on a zero count or an unclean password.
  static PasswordCorpus from_counts(
      const std::unordered_map<std::string, std::uint64_t>& counts,
      std::string source_label = {},
      std::size_t max_len = kDefaultMaxPasswordLength);
  static PasswordCorpus from_passwords(
      const std::vector<std::string>& passwords, std::string source_label = {},
      std::size_t max_len = kDefaultMaxPasswordLength);

  const std::vector<CorpusEntry>& entries() const { return entries_; }
  std::uint64_t total() const { return total_; }
  std::size_t unique_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::string& source_label() const { return label_; }

  std::uint64_t count(std::string_view pw) const;
  bool contains(std::string_view pw) const { return count(pw) > 0; }

  // Descending count, ties broken lexicographically.
  std::vector<CorpusEntry> by_frequency() const;

  // FNV-1a over the sorted (password, count) entries.
  std::uint64_t fingerprint() const;

 private:
  void build_index();

  std::vector<CorpusEntry> entries_;
  std::unordered_map<std::string_view, std::size_t> index_;
  std::uint64_t total_ = 0;
  std::string label_;
};

struct CorpusLoadStats {
  std::uint64_t lines_read = 0;
  std::uint64_t dropped = 0;
};

// One password per line. Lines with bytes outside 0x20-0x7E or longer than
// max_len are dropped; a trailing CR is stripped first. Throws IoError or
// EmptyInputError.
PasswordCorpus load_corpus(const std::filesystem::path& path,
                           std::size_t max_len = kDefaultMaxPasswordLength,
                           CorpusLoadStats* stats = nullptr);

// Inverse of load_corpus: each password written `count` times.
void write_corpus(const PasswordCorpus& corpus,
                  const std::filesystem::path& path);

struct SplitPair {
  PasswordCorpus train_half;
  PasswordCorpus test_half;
  std::uint64_t seed = 0;
};

// Shuffles unique passwords with a seeded generator and deals them alternately
// into the two halves; every password keeps its full count.
SplitPair split_shadow(const PasswordCorpus& corpus, std::uint64_t seed);

class AccountStore {
 public:
  // email is lowercased; the pair is ignored if the password is unclean.
  bool add(std::string_view email, std::string_view password,
           std::size_t max_len = kDefaultMaxPasswordLength);

  const std::map<std::string, std::set<std::string>>& accounts() const {
    return accounts_;
  }
  std::size_t size() const { return accounts_.size(); }
  std::uint64_t password_count() const;
  double mean_passwords_per_user() const;

  friend bool operator==(const AccountStore&, const AccountStore&) = default;

 private:
  std::map<std::string, std::set<std::string>> accounts_;
};

struct AccountLoadStats {
  std::uint64_t lines_read = 0;
  std::uint64_t malformed = 0;  // no separator or empty email
  std::uint64_t dropped = 0;    // password failed the cleaning rules
};

AccountStore load_accounts(const std::filesystem::path& path,
                           char separator = ':',
                           AccountLoadStats* stats = nullptr,
                           std::size_t max_len = kDefaultMaxPasswordLength);

class Blocklist {
 public:
  Blocklist() = default;
  Blocklist(std::vector<std::string> passwords, std::string name);

  const std::vector<std::string>& passwords() const { return passwords_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return passwords_.size(); }
  bool contains(std::string_view pw) const;

 private:
  std::vector<std::string> passwords_;
  std::unordered_set<std::string> members_;
  std::string name_;
};

// Keeps file order, first occurrence wins. Empty lines are not passwords.
Blocklist load_blocklist(const std::filesystem::path& path);

// Blocklist sizes published by the meter vendors, used as fixture targets.
struct PublishedBlocklistSize {
  std::string_view meter;
  std::size_t entries;
};
inline constexpr PublishedBlocklistSize kPublishedBlocklistSizes[] = {
    {"KeePSM", 10183},
    {"Zxcvbn", 47023},
    {"CUPS PSM", 87144},
};

struct OverlapResult {
  double ratio = 0.0;
  std::size_t k = 0;
  std::size_t intersection = 0;
  bool truncated = false;  // one list was shorter than k
};

// |top_k(a) ∩ top_k(b)| / k. Throws ArgumentError when k is 0, or when a list
// is shorter than k and allow_truncation is false.
OverlapResult overlap_ratio(const std::vector<std::string>& list_a,
                            const std::vector<std::string>& list_b,
                            std::size_t k, bool allow_truncation = false);

}  // namespace psmaudit
