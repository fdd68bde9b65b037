#include "canary/time.hpp"

#include <cstdio>

#include "canary/error.hpp"

namespace canary {

namespace chr = std::chrono;

Timestamp now_utc() { return chr::time_point_cast<Duration>(chr::system_clock::now()); }

Clock system_clock() { return [] { return now_utc(); }; }

std::string to_rfc3339(Timestamp ts) {
  auto day = chr::floor<chr::days>(ts);
  chr::year_month_day ymd{day};
  chr::hh_mm_ss tod{ts - day};
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", int(ymd.year()), unsigned(ymd.month()),
                        unsigned(ymd.day()), int(tod.hours().count()), int(tod.minutes().count()),
                        int(tod.seconds().count()));
  std::string out(buf, static_cast<std::size_t>(n));
  if (auto ms = tod.subseconds().count(); ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03d", int(ms));
    out += buf;
  }
  out += 'Z';
  return out;
}

std::string utc_date(Timestamp ts) {
  chr::year_month_day ymd{chr::floor<chr::days>(ts)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

namespace {

bool take_digits(std::string_view& s, std::size_t n, int& out) {
  if (s.size() < n) return false;
  out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  s.remove_prefix(n);
  return true;
}

bool take_char(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  auto fail = [&]() -> Timestamp { throw InputError("invalid timestamp: '" + std::string(text) + "'"); };
  std::string_view s = text;
  int y, mo, d;
  if (!take_digits(s, 4, y) || !take_char(s, '-') || !take_digits(s, 2, mo) || !take_char(s, '-') ||
      !take_digits(s, 2, d))
    return fail();
  chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(mo)}, chr::day{unsigned(d)}};
  if (!ymd.ok()) return fail();
  Timestamp ts = chr::time_point_cast<Duration>(chr::sys_days{ymd});
  if (s.empty()) return ts;
  if (!take_char(s, 'T') && !take_char(s, 't') && !take_char(s, ' ')) return fail();
  int h, mi, sec;
  if (!take_digits(s, 2, h) || !take_char(s, ':') || !take_digits(s, 2, mi) || !take_char(s, ':') ||
      !take_digits(s, 2, sec) || h > 23 || mi > 59 || sec > 60)
    return fail();
  ts += chr::hours(h) + chr::minutes(mi) + chr::seconds(sec);
  if (take_char(s, '.')) {
    int digits = 0, ms = 0;
    while (!s.empty() && s.front() >= '0' && s.front() <= '9') {
      if (digits < 3) ms = ms * 10 + (s.front() - '0');
      ++digits;
      s.remove_prefix(1);
    }
    if (digits == 0) return fail();
    for (int i = digits; i < 3; ++i) ms *= 10;
    ts += Duration(ms);
  }
  if (take_char(s, 'Z') || take_char(s, 'z')) {
    if (!s.empty()) return fail();
    return ts;
  }
  int sign = 0;
  if (take_char(s, '+')) sign = 1;
  else if (take_char(s, '-')) sign = -1;
  else return fail();
  int oh, om;
  if (!take_digits(s, 2, oh) || !take_char(s, ':') || !take_digits(s, 2, om) || !s.empty()) return fail();
  ts -= sign * (chr::hours(oh) + chr::minutes(om));
  return ts;
}

}  // namespace canary
