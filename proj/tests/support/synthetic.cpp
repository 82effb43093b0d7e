#include "synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include <unistd.h>

#include "psmaudit/rng.hpp"

namespace psmaudit::testing {

namespace {

constexpr const char* kSyllables[] = {
    "ka", "lo", "mi", "ra", "ten", "bo", "su", "dra", "gon", "pa",  "ss",
    "word", "mon", "key", "sun", "star", "love", "xi", "an", "el", "ma",
    "ri", "ne", "to", "shi", "ba", "by", "cat", "dog", "fi", "sh",  "qw",
    "er", "ty", "jo", "hn", "ni", "ck", "lu", "cy", "ro", "se",  "ja",
    "ke", "vin", "tor", "ia", "be", "ar", "go"};

std::string make_word(Rng& rng) {
  const std::size_t n_syl = std::size(kSyllables);
  std::string w;
  const auto parts = 1 + rng.below(3);
  for (std::uint64_t i = 0; i < parts; ++i) w += kSyllables[rng.below(n_syl)];
  return w;
}

std::string decorate(std::string w, Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.1) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  const double v = rng.uniform();
  if (v < 0.45) return w;
  if (v < 0.65) return w + std::to_string(rng.below(100));
  if (v < 0.80) return w + std::to_string(1960 + rng.below(56));
  if (v < 0.87) return w + "123";
  if (v < 0.93) return w + "!";
  return w + std::to_string(rng.below(10)) + std::to_string(rng.below(10)) +
         std::to_string(rng.below(10));
}

std::string variant_of(const std::string& base, Rng& rng) {
  std::string s = base;
  switch (rng.below(6)) {
    case 0:
      return s + std::to_string(rng.below(10));
    case 1:
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      return s;
    case 2:
      for (auto& c : s) {
        if (c == 'a') c = '@';
        else if (c == 'o') c = '0';
        else if (c == 'e') c = '3';
      }
      return s;
    case 3:
      return s + "!";
    case 4:
      return s + "123";
    default:
      return s + std::to_string(1 + rng.below(9));
  }
}

}  // namespace

std::vector<std::string> synthetic_vocabulary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  out.reserve(n);
  while (out.size() < n) {
    std::string w = decorate(make_word(rng), rng);
    if (w.size() > 30) continue;
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> zipf_lines(std::size_t draws, std::size_t vocab,
                                    double exponent, std::uint64_t seed) {
  auto words = synthetic_vocabulary(vocab, seed);
  std::vector<double> cumulative(words.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < words.size(); ++r) {
    acc += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    cumulative[r] = acc;
  }
  Rng rng(derive_seed(seed, "zipf-draws"));
  std::vector<std::string> lines;
  lines.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    lines.push_back(words[std::min(idx, words.size() - 1)]);
  }
  return lines;
}

PasswordCorpus zipf_corpus(std::size_t draws, std::size_t vocab,
                           double exponent, std::uint64_t seed) {
  return PasswordCorpus::from_passwords(zipf_lines(draws, vocab, exponent, seed),
                                        "zipf");
}

AccountStore synthetic_accounts(std::size_t users, std::uint64_t seed) {
  auto bases = synthetic_vocabulary(std::max<std::size_t>(users, 16), seed);
  Rng rng(derive_seed(seed, "accounts"));
  AccountStore store;
  for (std::size_t u = 0; u < users; ++u) {
    const std::string email = "user" + std::to_string(u) + "@example.test";
    const std::string& base = bases[rng.below(bases.size())];
    store.add(email, base);
    const auto extra = 1 + rng.below(2);
    for (std::uint64_t k = 0; k < extra; ++k) {
      if (rng.uniform() < 0.15)
        store.add(email, bases[rng.below(bases.size())]);
      else
        store.add(email, variant_of(base, rng));
    }
  }
  return store;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("psmaudit-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace psmaudit::testing
