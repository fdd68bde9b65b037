#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace canary {

/// ASCII letters and digits, plus every byte of a multi-byte UTF-8 sequence.
constexpr bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}
constexpr bool is_word_byte(char c) { return is_word_byte(static_cast<unsigned char>(c)); }

std::string ascii_lower(std::string_view s);

/// Collapses runs of ASCII whitespace to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

/// Case-insensitive, whitespace-normalized key used for token identity.
std::string comparison_key(std::string_view value);

/// True when `needle` occurring at `pos` in `text` is not glued to adjacent
/// word characters. Edges of the needle that are themselves non-word bytes
/// need no boundary.
bool boundary_match_at(std::string_view text, std::size_t pos, std::string_view needle);

/// Whether `needle` occurs in `text` at word boundaries.
bool contains_at_boundary(std::string_view text, std::string_view needle);

/// All substrings of `value` that begin and end on word boundaries, excluding
/// `value` itself. A value A is a word-level subset of B exactly when A is in
/// boundary_spans(B).
std::vector<std::string_view> boundary_spans(std::string_view value);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t mix64(std::uint64_t x);

std::string hex_lower(const unsigned char* data, std::size_t n);

/// Platform-stable random helpers over mt19937_64 (the standard
/// distributions are implementation-defined, which would break seeded
/// reproducibility across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform double in [0, 1).
  double unit();
  bool chance(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace canary
