#include "canary/normalize.hpp"

#include <array>
#include <chrono>
#include <cstdio>

#include "canary/text.hpp"

namespace canary {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

/// Length of the digit run at i, capped at max + 1 so callers can reject
/// overlong runs.
std::size_t digit_run(std::string_view s, std::size_t i, std::size_t max) {
  std::size_t n = 0;
  while (i + n < s.size() && is_digit(s[i + n]) && n <= max) ++n;
  return n;
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

bool valid_date(int y, int m, int d) {
  using namespace std::chrono;
  return y >= 1000 && m >= 1 && d >= 1 &&
         year_month_day{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}}.ok();
}

std::string ymd(int y, int m, int d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

bool starts_token(std::string_view s, std::size_t i) { return i == 0 || !is_word_byte(s[i - 1]); }
bool ends_numeric(std::string_view s, std::size_t i) { return i >= s.size() || !is_digit(s[i]); }
bool ends_token(std::string_view s, std::size_t i) { return i >= s.size() || !is_word_byte(s[i]); }

struct Match {
  std::size_t length = 0;
  std::string replacement;
};

// Months by full name, then common abbreviations.
constexpr std::array<std::string_view, 12> kMonths{"january", "february", "march",     "april",   "may",      "june",
                                                   "july",    "august",   "september", "october", "november", "december"};

/// Month name at i: returns (month, length) or (0, 0).
std::pair<int, std::size_t> month_at(std::string_view s, std::size_t i) {
  if (!starts_token(s, i)) return {0, 0};
  for (int m = 0; m < 12; ++m) {
    auto full = kMonths[static_cast<std::size_t>(m)];
    if (s.substr(i, full.size()) == full && ends_token(s, i + full.size())) return {m + 1, full.size()};
  }
  if (s.substr(i, 4) == "sept" && ends_token(s, i + 4)) {
    std::size_t n = 4 + (i + 4 < s.size() && s[i + 4] == '.');
    return {9, n};
  }
  for (int m = 0; m < 12; ++m) {
    auto abbr = kMonths[static_cast<std::size_t>(m)].substr(0, 3);
    if (s.substr(i, 3) == abbr && ends_token(s, i + 3)) {
      std::size_t n = 3 + (i + 3 < s.size() && s[i + 3] == '.');
      return {m + 1, n};
    }
  }
  return {0, 0};
}

std::size_t skip_ordinal(std::string_view s, std::size_t i) {
  for (std::string_view suf : {"st", "nd", "rd", "th"})
    if (s.substr(i, 2) == suf && ends_token(s, i + 2)) return i + 2;
  return i;
}

/// "<month> <d>[th][,] <yyyy>"
Match month_first(std::string_view s, std::size_t i) {
  auto [m, len] = month_at(s, i);
  if (!m) return {};
  auto p = i + len;
  if (p >= s.size() || s[p] != ' ') return {};
  p += 1;
  auto dn = digit_run(s, p, 2);
  if (dn == 0 || dn > 2) return {};
  int d = to_int(s.substr(p, dn));
  p = skip_ordinal(s, p + dn);
  if (p < s.size() && s[p] == ',') ++p;
  if (p >= s.size() || s[p] != ' ') return {};
  ++p;
  auto yn = digit_run(s, p, 4);
  if (yn != 4 || !ends_numeric(s, p + 4)) return {};
  int y = to_int(s.substr(p, 4));
  if (!valid_date(y, m, d)) return {};
  return {p + 4 - i, ymd(y, m, d)};
}

/// "<d>[th] [of ]<month>[,] <yyyy>"
Match day_first(std::string_view s, std::size_t i) {
  auto dn = digit_run(s, i, 2);
  if (dn == 0 || dn > 2) return {};
  int d = to_int(s.substr(i, dn));
  auto p = skip_ordinal(s, i + dn);
  if (p >= s.size() || s[p] != ' ') return {};
  ++p;
  if (s.substr(p, 3) == "of ") p += 3;
  auto [m, len] = month_at(s, p);
  if (!m) return {};
  p += len;
  if (p < s.size() && s[p] == ',') ++p;
  if (p >= s.size() || s[p] != ' ') return {};
  ++p;
  auto yn = digit_run(s, p, 4);
  if (yn != 4 || !ends_numeric(s, p + 4)) return {};
  int y = to_int(s.substr(p, 4));
  if (!valid_date(y, m, d)) return {};
  return {p + 4 - i, ymd(y, m, d)};
}

/// Three digit groups joined by one separator character.
struct Triple {
  std::string_view a, b, c;
  char sep = 0;
  std::size_t length = 0;
};

Triple triple_at(std::string_view s, std::size_t i) {
  auto an = digit_run(s, i, 4);
  if (an == 0 || an > 4) return {};
  auto p = i + an;
  if (p >= s.size()) return {};
  char sep = s[p];
  if (sep != '-' && sep != '/' && sep != '.') return {};
  auto bn = digit_run(s, p + 1, 4);
  if (bn == 0 || bn > 4) return {};
  auto q = p + 1 + bn;
  if (q >= s.size() || s[q] != sep) return {};
  auto cn = digit_run(s, q + 1, 4);
  if (cn == 0 || cn > 4) return {};
  auto end = q + 1 + cn;
  if (!ends_numeric(s, end)) return {};
  // "2024-03-05.5" or "1.2.3.4" are not dates.
  if (end + 1 < s.size() && s[end] == sep && is_digit(s[end + 1])) return {};
  return {s.substr(i, an), s.substr(p + 1, bn), s.substr(q + 1, cn), sep, end - i};
}

Match numeric_date(std::string_view s, std::size_t i) {
  auto t = triple_at(s, i);
  if (!t.length) return {};
  if (t.a.size() == 4 && t.b.size() <= 2 && t.c.size() <= 2) {
    int y = to_int(t.a), m = to_int(t.b), d = to_int(t.c);
    if (valid_date(y, m, d)) return {t.length, ymd(y, m, d)};
    return {};
  }
  if (t.c.size() == 4 && t.a.size() <= 2 && t.b.size() <= 2) {
    int y = to_int(t.c);
    if (t.sep == '/') {
      int m = to_int(t.a), d = to_int(t.b);
      if (valid_date(y, m, d)) return {t.length, ymd(y, m, d)};
    } else if (t.sep == '.') {
      int d = to_int(t.a), m = to_int(t.b);
      if (valid_date(y, m, d)) return {t.length, ymd(y, m, d)};
    }
  }
  return {};
}

std::string rewrite_dates(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    Match m;
    if (starts_token(s, i)) {
      if (is_digit(s[i])) {
        m = numeric_date(s, i);
        if (!m.length) m = day_first(s, i);
      } else {
        m = month_first(s, i);
      }
    }
    if (m.length) {
      out += m.replacement;
      i += m.length;
    } else {
      out += s[i++];
    }
  }
  return out;
}

bool phone_sep(char c) { return c == '-' || c == '.' || c == ' '; }

/// Ten national digits as area/exchange/line, in the renderings
/// "(555) 123-4567", "555-123-4567", "555.123.4567", "555 123 4567",
/// "5551234567", with "+1 ", "1-", "+1" prefixes.
Match phone_at(std::string_view s, std::size_t i) {
  auto p = i;
  bool plus = false;
  if (s[p] == '+') {
    plus = true;
    ++p;
  }
  // Country code: "+1" with optional separator, or "1" followed by a separator.
  if (p < s.size() && s[p] == '1') {
    auto q = p + 1;
    bool sep = q < s.size() && phone_sep(s[q]);
    bool next_open = q < s.size() && s[q] == '(';
    if (plus && (sep || next_open || (q < s.size() && is_digit(s[q]) && digit_run(s, q, 10) == 10))) {
      p = sep ? q + 1 : q;
    } else if (!plus && sep && q + 1 < s.size() && (is_digit(s[q + 1]) || s[q + 1] == '(')) {
      // Only when the rest parses as a full phone; checked below.
      p = q + 1;
    }
  } else if (plus) {
    return {};
  }

  auto parse_national = [&](std::size_t start) -> Match {
    std::size_t k = start;
    std::string area, exch, line;
    if (k < s.size() && s[k] == '(') {
      if (digit_run(s, k + 1, 3) != 3 || k + 4 >= s.size() || s[k + 4] != ')') return {};
      area = std::string(s.substr(k + 1, 3));
      k += 5;
      if (k < s.size() && (s[k] == ' ' || s[k] == '-')) ++k;
    } else {
      auto run = digit_run(s, k, 10);
      if (run == 10 && ends_numeric(s, k + 10)) {
        auto d = s.substr(k, 10);
        return {k + 10 - i,
                std::string(d.substr(0, 3)) + "-" + std::string(d.substr(3, 3)) + "-" + std::string(d.substr(6))};
      }
      if (run != 3) return {};
      area = std::string(s.substr(k, 3));
      k += 3;
      if (k >= s.size() || !phone_sep(s[k])) return {};
      char sep = s[k];
      ++k;
      if (digit_run(s, k, 3) != 3) return {};
      exch = std::string(s.substr(k, 3));
      k += 3;
      if (k >= s.size() || s[k] != sep) return {};
      ++k;
      if (digit_run(s, k, 4) != 4 || !ends_numeric(s, k + 4)) return {};
      line = std::string(s.substr(k, 4));
      k += 4;
      return {k - i, area + "-" + exch + "-" + line};
    }
    if (digit_run(s, k, 3) != 3) return {};
    exch = std::string(s.substr(k, 3));
    k += 3;
    if (k < s.size() && phone_sep(s[k])) ++k;
    if (digit_run(s, k, 4) != 4 || !ends_numeric(s, k + 4)) return {};
    line = std::string(s.substr(k, 4));
    k += 4;
    return {k - i, area + "-" + exch + "-" + line};
  };

  auto m = parse_national(p);
  if (!m.length && p != i && !plus) m = parse_national(i);  // the "1" was not a country code
  return m;
}

std::string rewrite_phones(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    Match m;
    bool boundary = i == 0 || !(is_word_byte(s[i - 1]) || s[i - 1] == '-' || s[i - 1] == '.' || s[i - 1] == '+');
    if (boundary && (is_digit(s[i]) || s[i] == '(' || s[i] == '+')) m = phone_at(s, i);
    if (m.length) {
      out += m.replacement;
      i += m.length;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::string remove_digit_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && !out.empty() && is_digit(out.back()) && digit_run(s, i + 1, 3) == 3 &&
        ends_numeric(s, i + 4))
      continue;
    out += s[i];
  }
  return out;
}

}  // namespace

std::string normalize_response(std::string_view raw) {
  auto s = comparison_key(raw);
  // Removing a comma can join digits into a new date or phone shape, so the
  // passes repeat until nothing changes.
  for (int round = 0; round < 8; ++round) {
    auto next = remove_digit_commas(rewrite_phones(rewrite_dates(s)));
    if (next == s) break;
    s = std::move(next);
  }
  return s;
}

}  // namespace canary
