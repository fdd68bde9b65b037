#include "canary/fingerprint.hpp"

#include <array>
#include <cctype>

#include "canary/text.hpp"

namespace canary {

namespace {

struct UaRule {
  std::string_view needle;        // lowercase substring to look for
  std::string_view family;        // reported family
  std::string_view version_from;  // lowercase "token/" whose suffix is the version; empty = needle
};

// Order matters: declared crawler and assistant tokens must win over the
// "Mozilla/5.0 ... Chrome/..." shells many of them embed.
constexpr std::array kBotRules{
    UaRule{"oai-searchbot", "OAI-SearchBot", ""},
    UaRule{"chatgpt-user", "ChatGPT-User", ""},
    UaRule{"gptbot", "GPTBot", ""},
    UaRule{"claude-searchbot", "Claude-SearchBot", ""},
    UaRule{"claude-user", "Claude-User", ""},
    UaRule{"claudebot", "ClaudeBot", ""},
    UaRule{"anthropic-ai", "anthropic-ai", ""},
    UaRule{"perplexity-user", "Perplexity-User", ""},
    UaRule{"perplexitybot", "PerplexityBot", ""},
    UaRule{"duckassistbot", "DuckAssistBot", ""},
    UaRule{"duckduckbot", "DuckDuckBot", ""},
    UaRule{"mistralai-user", "MistralAI-User", ""},
    UaRule{"mistralai-index", "MistralAI-Index", ""},
    UaRule{"meta-externalagent", "meta-externalagent", ""},
    UaRule{"meta-externalfetcher", "meta-externalfetcher", ""},
    UaRule{"meta-webindexer", "meta-webindexer", ""},
    UaRule{"facebookexternalhit", "facebookexternalhit", ""},
    UaRule{"amzn-searchbot", "Amzn-SearchBot", ""},
    UaRule{"amzn-user", "Amzn-User", ""},
    UaRule{"amazonbot", "Amazonbot", ""},
    UaRule{"graniteplayground", "GranitePlayground", ""},
    UaRule{"google-extended", "Google-Extended", ""},
    UaRule{"google-inspectiontool", "Google-InspectionTool", ""},
    UaRule{"adsbot-google", "AdsBot-Google", ""},
    UaRule{"googlebot", "Googlebot", ""},
    UaRule{"bingpreview", "BingPreview", ""},
    UaRule{"microsoftpreview", "MicrosoftPreview", ""},
    UaRule{"bingbot", "Bingbot", ""},
    UaRule{"bravebot", "Bravebot", ""},
    UaRule{"baiduspider", "Baiduspider", ""},
    UaRule{"erniebot", "ERNIEBot", ""},
    UaRule{"applebot-extended", "Applebot-Extended", ""},
    UaRule{"applebot", "Applebot", ""},
    UaRule{"yandexbot", "YandexBot", ""},
    UaRule{"bytespider", "Bytespider", ""},
    UaRule{"ccbot", "CCBot", ""},
    UaRule{"petalbot", "PetalBot", ""},
    UaRule{"semrushbot", "SemrushBot", ""},
    UaRule{"ahrefsbot", "AhrefsBot", ""},
    UaRule{"yahoo! slurp", "Yahoo! Slurp", ""},
    UaRule{"sogou web spider", "Sogou", ""},
    UaRule{"360spider", "360Spider", ""},
    UaRule{"archive.org_bot", "archive.org_bot", ""},
};

// Browser shells and embedded app browsers, most specific first.
constexpr std::array kBrowserRules{
    UaRule{"windowswechat", "WindowsWechat", "micromessenger/"},
    UaRule{"micromessenger", "WeChat", "micromessenger/"},
    UaRule{"quarkpc", "QuarkPC", ""},
    UaRule{"quark/", "Quark", ""},
    UaRule{"slbrowser", "SLBrowser", ""},
    UaRule{"qaxbrowser", "Qaxbrowser", ""},
    UaRule{"qqbrowser", "QQBrowser", ""},
    UaRule{"obsidian/", "Obsidian", ""},
    UaRule{"ucbrowser", "UCBrowser", ""},
    UaRule{"yabrowser", "Yandex Browser", ""},
    UaRule{"samsungbrowser", "Samsung Internet", ""},
    UaRule{"vivaldi/", "Vivaldi", ""},
    UaRule{"opr/", "Opera", ""},
    UaRule{"opera", "Opera", "version/"},
    UaRule{"edg/", "Edge", ""},
    UaRule{"edga/", "Edge", ""},
    UaRule{"edgios/", "Edge", ""},
    UaRule{"edge/", "Edge", ""},
    UaRule{"headlesschrome/", "HeadlessChrome", ""},
    UaRule{"fxios/", "Firefox", ""},
    UaRule{"firefox/", "Firefox", ""},
    UaRule{"crios/", "Chrome", ""},
    UaRule{"chromium/", "Chromium", ""},
    UaRule{"chrome/", "Chrome", ""},
    UaRule{"safari/", "Safari", "version/"},
    UaRule{"trident/", "Internet Explorer", "rv:"},
    UaRule{"msie ", "Internet Explorer", "msie "},
};

constexpr std::array<std::string_view, 5> kCrawlerWords{"bot", "spider", "crawler", "crawl", "fetcher"};

bool is_version_char(char c) { return (c >= '0' && c <= '9') || c == '.'; }

std::optional<std::string> version_after(std::string_view raw, std::string_view lower, std::string_view key) {
  if (key.empty()) return std::nullopt;
  auto pos = lower.find(key);
  if (pos == std::string_view::npos) return std::nullopt;
  pos += key.size();
  if (key.back() != '/' && key.back() != ' ' && key.back() != ':') {
    if (pos >= raw.size() || (raw[pos] != '/' && raw[pos] != ' ')) return std::nullopt;
    ++pos;
  }
  std::size_t end = pos;
  while (end < raw.size() && is_version_char(raw[end])) ++end;
  if (end == pos) return std::nullopt;
  return std::string(raw.substr(pos, end - pos));
}

UserAgentInfo from_rule(std::string_view raw, std::string_view lower, const UaRule& rule) {
  UserAgentInfo info{std::string(raw), std::string(rule.family), std::nullopt};
  info.version = version_after(raw, lower, rule.version_from.empty() ? rule.needle : rule.version_from);
  return info;
}

bool is_token_char(char c) { return is_word_byte(c) || c == '-' || c == '_' || c == '.' || c == '!'; }

// Product tokens: maximal runs of token characters, optionally "/version".
struct ProductToken {
  std::string_view name;
  std::string_view version;
};

std::vector<ProductToken> product_tokens(std::string_view raw) {
  std::vector<ProductToken> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (!is_token_char(raw[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < raw.size() && is_token_char(raw[i])) ++i;
    ProductToken tok{raw.substr(start, i - start), {}};
    if (i < raw.size() && raw[i] == '/') {
      std::size_t vs = ++i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && raw[i] != ';' && raw[i] != ')')
        ++i;
      tok.version = raw.substr(vs, i - vs);
    }
    out.push_back(tok);
  }
  return out;
}

}  // namespace

UserAgentInfo parse_user_agent(std::string_view raw) {
  const std::string lower = ascii_lower(raw);
  for (const auto& rule : kBotRules)
    if (lower.find(rule.needle) != std::string::npos) return from_rule(raw, lower, rule);

  auto tokens = product_tokens(raw);
  // Unlisted crawlers: the first product token naming itself a bot/spider.
  for (const auto& tok : tokens) {
    auto name = ascii_lower(tok.name);
    for (auto word : kCrawlerWords)
      if (name.size() > word.size() && name.find(word) != std::string::npos) {
        UserAgentInfo info{std::string(raw), std::string(tok.name), std::nullopt};
        if (!tok.version.empty()) info.version = std::string(tok.version);
        return info;
      }
  }

  for (const auto& rule : kBrowserRules)
    if (lower.find(rule.needle) != std::string::npos) return from_rule(raw, lower, rule);

  for (const auto& tok : tokens) {
    bool has_alpha = false;
    for (char c : tok.name) has_alpha |= (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (!has_alpha) continue;
    UserAgentInfo info{std::string(raw), std::string(tok.name), std::nullopt};
    if (!tok.version.empty()) info.version = std::string(tok.version);
    return info;
  }
  return {std::string(raw), "unknown", std::nullopt};
}

std::uint64_t ScraperFingerprint::stable_hash() const {
  auto h = fnv1a64(user_agent);
  return mix64(h ^ (std::uint64_t{asn} * 0x9e3779b97f4a7c15ULL));
}

std::string ScraperFingerprint::to_string() const { return user_agent + " | AS" + std::to_string(asn); }

ScraperFingerprint fingerprint_of(const RequestMeta& meta, const AsnDatabase& db) {
  return {meta.user_agent, resolve_asn(meta.source_ip, db)};
}

}  // namespace canary
