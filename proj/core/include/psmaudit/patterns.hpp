#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "psmaudit/corpus.hpp"

namespace psmaudit {

// Lowercased names of length >= 3.
class NameDictionary {
 public:
  NameDictionary() = default;
  explicit NameDictionary(const std::vector<std::string>& names);
  static NameDictionary load(const std::filesystem::path& path);

  bool contains(std::string_view lowered) const;
  std::size_t size() const { return names_.size(); }
  std::size_t max_length() const { return max_len_; }

 private:
  std::unordered_set<std::string> names_;
  std::size_t max_len_ = 0;
};

// Case-insensitive substring match against the dictionary.
bool detect_name(std::string_view password, const NameDictionary& names);

enum class DateFormat { YYYY, MMDD, YYMMDD, DDMMYY, YYYYMMDD, DDMMYYYY };
std::string_view to_string(DateFormat f);

struct DateMatch {
  std::string digits;
  DateFormat format = DateFormat::YYYY;
  int year = 0, month = 0, day = 0;  // month/day 0 for YYYY
  bool ambiguous = false;            // no four-digit year in the run
};

// Counts of maximal digit runs across a corpus, weighted by password count.
class DigitRunFrequency {
 public:
  DigitRunFrequency() = default;
  explicit DigitRunFrequency(const PasswordCorpus& corpus);
  std::uint64_t count(std::string_view run) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

struct DateOptions {
  int min_year = 1900;
  int max_year = 2023;
  // Ambiguous dates (no four-digit year) need a corpus frequency strictly
  // greater than this; without a frequency table they are accepted.
  std::uint64_t frequency_threshold = 10;
};

// Maximal digit runs of length 4, 6 or 8 are tried against YYYY/MMDD,
// YYMMDD/DDMMYY, YYYYMMDD/DDMMYYYY (first valid format wins, in that order).
// Two-digit years map to 2000-2023 when <= 23, otherwise 1924-1999.
std::optional<DateMatch> match_date(std::string_view password,
                                    const DigitRunFrequency* frequencies,
                                    const DateOptions& options = {});
bool detect_date(std::string_view password,
                 const DigitRunFrequency* frequencies,
                 const DateOptions& options = {});

enum class PhoneFormat { Uk07, Uk7, Uk447, Us };
std::string_view to_string(PhoneFormat f);

// Tokens are maximal runs of digits and dashes. UK: 07 + 8/9 digits,
// 7 + 8/9 digits, 447 + 7/8 digits (dashes not allowed). US: area code 2XX,
// then 3 + 4 digits, written 2XXXXXXXXX, 2XX-XXX-XXXX or 2XXXXX-XXXX, and
// using at least kMinDistinctUsDigits distinct digits.
inline constexpr int kMinDistinctUsDigits = 4;
std::optional<PhoneFormat> match_phone(std::string_view password);
bool detect_phone(std::string_view password);

struct Recognizers {
  const NameDictionary* names = nullptr;
  const DigitRunFrequency* date_frequencies = nullptr;
  DateOptions date_options;
  bool phones = true;
};

struct PatternStats {
  std::size_t total = 0;
  std::size_t names = 0, dates = 0, phones = 0;
  double name_pct = 0.0, date_pct = 0.0, phone_pct = 0.0;  // 0..100
};

// Throws ArgumentError on an empty list.
PatternStats pattern_stats(const std::vector<std::string>& passwords,
                           const Recognizers& recognizers);

}  // namespace psmaudit
