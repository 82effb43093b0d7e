#include "psmaudit/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "psmaudit/error.hpp"

namespace psmaudit {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string lowered(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Maximal runs of characters accepted by pred.
template <typename Pred>
std::vector<std::string_view> runs(std::string_view s, Pred pred) {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < s.size();) {
    if (!pred(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && pred(s[j])) ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

int num(std::string_view s, std::size_t pos, std::size_t len) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

int expand_year(int yy) { return yy <= 23 ? 2000 + yy : 1900 + yy; }

}  // namespace

NameDictionary::NameDictionary(const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n.size() < 3) continue;
    std::string l = lowered(n);
    max_len_ = std::max(max_len_, l.size());
    names_.insert(std::move(l));
  }
}

NameDictionary NameDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  NameDictionary d(names);
  if (d.size() == 0) throw EmptyInputError("no names of length >= 3 in " + path.string());
  return d;
}

bool NameDictionary::contains(std::string_view lowered_name) const {
  return names_.count(std::string(lowered_name)) > 0;
}

bool detect_name(std::string_view password, const NameDictionary& names) {
  const std::string pw = lowered(password);
  const std::size_t longest = std::min(names.max_length(), pw.size());
  for (std::size_t len = 3; len <= longest; ++len)
    for (std::size_t i = 0; i + len <= pw.size(); ++i)
      if (names.contains(std::string_view(pw).substr(i, len))) return true;
  return false;
}

std::string_view to_string(DateFormat f) {
  switch (f) {
    case DateFormat::YYYY: return "YYYY";
    case DateFormat::MMDD: return "MMDD";
    case DateFormat::YYMMDD: return "YYMMDD";
    case DateFormat::DDMMYY: return "DDMMYY";
    case DateFormat::YYYYMMDD: return "YYYYMMDD";
    case DateFormat::DDMMYYYY: return "DDMMYYYY";
  }
  return "unknown";
}

DigitRunFrequency::DigitRunFrequency(const PasswordCorpus& corpus) {
  for (const auto& e : corpus.entries())
    for (auto r : runs(e.password, is_digit)) counts_[std::string(r)] += e.count;
}

std::uint64_t DigitRunFrequency::count(std::string_view run) const {
  auto it = counts_.find(std::string(run));
  return it == counts_.end() ? 0 : it->second;
}

namespace {

std::optional<DateMatch> parse_run(std::string_view d, const DateOptions& o) {
  auto year_ok = [&](int y) { return y >= o.min_year && y <= o.max_year; };
  auto md_ok = [](int m, int day) { return m >= 1 && m <= 12 && day >= 1 && day <= 31; };
  DateMatch m;
  m.digits = std::string(d);
  if (d.size() == 4) {
    if (int y = num(d, 0, 4); year_ok(y)) {
      m.format = DateFormat::YYYY;
      m.year = y;
      return m;
    }
    if (int mm = num(d, 0, 2), dd = num(d, 2, 2); md_ok(mm, dd)) {
      m.format = DateFormat::MMDD;
      m.month = mm;
      m.day = dd;
      m.ambiguous = true;
      return m;
    }
  } else if (d.size() == 6) {
    int y = expand_year(num(d, 0, 2)), mm = num(d, 2, 2), dd = num(d, 4, 2);
    if (year_ok(y) && md_ok(mm, dd)) {
      m.format = DateFormat::YYMMDD;
      m.year = y, m.month = mm, m.day = dd;
      m.ambiguous = true;
      return m;
    }
    dd = num(d, 0, 2), mm = num(d, 2, 2), y = expand_year(num(d, 4, 2));
    if (year_ok(y) && md_ok(mm, dd)) {
      m.format = DateFormat::DDMMYY;
      m.year = y, m.month = mm, m.day = dd;
      m.ambiguous = true;
      return m;
    }
  } else if (d.size() == 8) {
    int y = num(d, 0, 4), mm = num(d, 4, 2), dd = num(d, 6, 2);
    if (year_ok(y) && md_ok(mm, dd)) {
      m.format = DateFormat::YYYYMMDD;
      m.year = y, m.month = mm, m.day = dd;
      return m;
    }
    dd = num(d, 0, 2), mm = num(d, 2, 2), y = num(d, 4, 4);
    if (year_ok(y) && md_ok(mm, dd)) {
      m.format = DateFormat::DDMMYYYY;
      m.year = y, m.month = mm, m.day = dd;
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<DateMatch> match_date(std::string_view password,
                                    const DigitRunFrequency* frequencies,
                                    const DateOptions& options) {
  for (auto r : runs(password, is_digit)) {
    auto m = parse_run(r, options);
    if (!m) continue;
    if (m->ambiguous && frequencies &&
        frequencies->count(r) <= options.frequency_threshold)
      continue;
    return m;
  }
  return std::nullopt;
}

bool detect_date(std::string_view password, const DigitRunFrequency* frequencies,
                 const DateOptions& options) {
  return match_date(password, frequencies, options).has_value();
}

std::string_view to_string(PhoneFormat f) {
  switch (f) {
    case PhoneFormat::Uk07: return "uk-07";
    case PhoneFormat::Uk7: return "uk-7";
    case PhoneFormat::Uk447: return "uk-447";
    case PhoneFormat::Us: return "us";
  }
  return "unknown";
}

namespace {

bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), is_digit);
}

bool us_shape(std::string_view t) {
  std::string digits;
  if (t.size() == 10 && all_digits(t)) {
    digits = std::string(t);
  } else if (t.size() == 12 && t[3] == '-' && t[7] == '-') {
    digits = std::string(t.substr(0, 3)) + std::string(t.substr(4, 3)) +
             std::string(t.substr(8, 4));
  } else if (t.size() == 11 && t[6] == '-') {
    digits = std::string(t.substr(0, 6)) + std::string(t.substr(7, 4));
  } else {
    return false;
  }
  if (digits.size() != 10 || !all_digits(digits) || digits[0] != '2') return false;
  bool seen[10] = {};
  int distinct = 0;
  for (char c : digits)
    if (!seen[c - '0']) {
      seen[c - '0'] = true;
      ++distinct;
    }
  return distinct >= kMinDistinctUsDigits;
}

}  // namespace

std::optional<PhoneFormat> match_phone(std::string_view password) {
  for (auto t : runs(password, [](char c) { return is_digit(c) || c == '-'; })) {
    if (all_digits(t)) {
      const std::size_t n = t.size();
      if (t.substr(0, 2) == "07" && (n == 10 || n == 11)) return PhoneFormat::Uk07;
      if (t.substr(0, 3) == "447" && (n == 10 || n == 11)) return PhoneFormat::Uk447;
      if (t[0] == '7' && (n == 9 || n == 10)) return PhoneFormat::Uk7;
    }
    if (us_shape(t)) return PhoneFormat::Us;
  }
  return std::nullopt;
}

bool detect_phone(std::string_view password) {
  return match_phone(password).has_value();
}

PatternStats pattern_stats(const std::vector<std::string>& passwords,
                           const Recognizers& recognizers) {
  if (passwords.empty()) throw ArgumentError("pattern stats need at least one password");
  PatternStats s;
  s.total = passwords.size();
  for (const auto& pw : passwords) {
    if (recognizers.names && detect_name(pw, *recognizers.names)) ++s.names;
    if (detect_date(pw, recognizers.date_frequencies, recognizers.date_options)) ++s.dates;
    if (recognizers.phones && detect_phone(pw)) ++s.phones;
  }
  const auto n = static_cast<double>(s.total);
  s.name_pct = 100.0 * static_cast<double>(s.names) / n;
  s.date_pct = 100.0 * static_cast<double>(s.dates) / n;
  s.phone_pct = 100.0 * static_cast<double>(s.phones) / n;
  return s;
}

}  // namespace psmaudit
