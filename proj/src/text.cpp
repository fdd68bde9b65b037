#include "canary/text.hpp"

namespace canary {

namespace {
constexpr bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
}  // namespace

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::string comparison_key(std::string_view value) { return ascii_lower(collapse_whitespace(value)); }

bool boundary_match_at(std::string_view text, std::size_t pos, std::string_view needle) {
  if (needle.empty() || pos + needle.size() > text.size()) return false;
  if (pos > 0 && is_word_byte(needle.front()) && is_word_byte(text[pos - 1])) return false;
  std::size_t end = pos + needle.size();
  if (end < text.size() && is_word_byte(needle.back()) && is_word_byte(text[end])) return false;
  return true;
}

bool contains_at_boundary(std::string_view text, std::string_view needle) {
  if (needle.empty()) return false;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1))
    if (boundary_match_at(text, pos, needle)) return true;
  return false;
}

std::vector<std::string_view> boundary_spans(std::string_view value) {
  std::vector<std::size_t> starts, ends;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i == 0 || !is_word_byte(value[i - 1]) || !is_word_byte(value[i])) starts.push_back(i);
    std::size_t e = i + 1;
    if (e == value.size() || !is_word_byte(value[e]) || !is_word_byte(value[i])) ends.push_back(e);
  }
  std::vector<std::string_view> spans;
  for (auto s : starts)
    for (auto e : ends) {
      if (e <= s || (s == 0 && e == value.size())) continue;
      auto span = value.substr(s, e - s);
      // Spans that begin or end on whitespace are not standalone values.
      if (is_space(span.front()) || is_space(span.back())) continue;
      spans.push_back(span);
    }
  return spans;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex_lower(const unsigned char* data, std::size_t n) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 0xf];
  }
  return out;
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % n;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace canary
