#include "canary/chatbot_client.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "canary/error.hpp"
#include "canary/text.hpp"

namespace canary {

std::string InteractionIdGenerator::next() {
  auto n = counter_.fetch_add(1, std::memory_order_relaxed) + 1;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(n));
  return prefix_ + "-" + buf;
}

std::string fresh_interaction_prefix() {
  auto stamp = to_rfc3339(now_utc());
  std::string compact;
  for (char c : stamp)
    if (std::isalnum(static_cast<unsigned char>(c))) compact += c;
  std::random_device rd;
  std::uint64_t bits = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  unsigned char raw[4];
  for (int i = 0; i < 4; ++i) raw[i] = static_cast<unsigned char>(bits >> (8 * i));
  return compact + "-" + hex_lower(raw, 4);
}

namespace {

std::string trim_block(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// "query 1:" or "response 2:" at the start of a line.
bool header_at(const std::string& line, bool& is_query, int& index, std::string& rest) {
  auto lower = ascii_lower(line);
  std::size_t p = lower.find_first_not_of(" \t");
  if (p == std::string::npos) return false;
  std::string_view l(lower);
  l.remove_prefix(p);
  if (l.starts_with("query ")) {
    is_query = true;
    l.remove_prefix(6);
  } else if (l.starts_with("response ")) {
    is_query = false;
    l.remove_prefix(9);
  } else {
    return false;
  }
  std::size_t digits = 0;
  while (digits < l.size() && std::isdigit(static_cast<unsigned char>(l[digits]))) ++digits;
  if (digits == 0 || digits >= l.size() || l[digits] != ':') return false;
  index = std::stoi(std::string(l.substr(0, digits)));
  auto consumed = line.size() - (l.size() - digits - 1);
  rest = line.substr(consumed);
  return true;
}

}  // namespace

std::vector<TranscriptTurn> parse_transcript(std::string_view text) {
  std::map<int, TranscriptTurn> turns;
  std::map<std::pair<int, bool>, bool> seen;
  std::string* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool is_query = false;
    int index = 0;
    std::string rest;
    if (header_at(line, is_query, index, rest)) {
      if (index < 1 || index > 2) throw InputError("transcript section index must be 1 or 2");
      if (seen[{index, is_query}]) throw InputError("transcript repeats a section for query " + std::to_string(index));
      seen[{index, is_query}] = true;
      auto& t = turns[index];
      t.index = index;
      current = is_query ? &t.query : &t.response;
      *current = rest;
      continue;
    }
    if (current) {
      if (!current->empty()) *current += "\n";
      *current += line;
    }
  }
  if (!seen[{1, false}]) throw InputError("transcript has no 'Response 1:' section");
  if (seen[{2, true}] && !seen[{2, false}]) throw InputError("transcript has 'Query 2:' without 'Response 2:'");
  std::vector<TranscriptTurn> out;
  for (auto& [_, t] : turns) {
    t.query = trim_block(t.query);
    t.response = trim_block(t.response);
    if (t.index == 2 && !seen[{2, false}]) continue;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace canary
