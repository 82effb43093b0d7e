#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psmaudit/corpus.hpp"

namespace psmaudit::testing {

// Distinct password-like strings: syllable words, optional case change and
// digit/symbol suffixes. Deterministic in seed.
std::vector<std::string> synthetic_vocabulary(std::size_t n, std::uint64_t seed);

// `draws` passwords sampled from a Zipf(exponent) law over a vocabulary of
// `vocab` strings, returned as raw lines (duplicates kept).
std::vector<std::string> zipf_lines(std::size_t draws, std::size_t vocab,
                                    double exponent, std::uint64_t seed);

PasswordCorpus zipf_corpus(std::size_t draws, std::size_t vocab,
                           double exponent, std::uint64_t seed);

// Users with 2-3 passwords each; later passwords are usually rule variants
// of the first (digit append, capitalization, leet, suffix change).
AccountStore synthetic_accounts(std::size_t users, std::uint64_t seed);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines);
std::string read_file(const std::filesystem::path& path);

}  // namespace psmaudit::testing
