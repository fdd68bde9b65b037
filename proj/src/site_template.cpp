#include "canary/site_template.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "canary/error.hpp"
#include "canary/text.hpp"

namespace canary {

std::string_view to_string(SiteCondition c) {
  switch (c) {
    case SiteCondition::Online: return "online";
    case SiteCondition::Offline: return "offline";
    case SiteCondition::RobotsBlocked: return "robots-blocked";
  }
  return "online";
}

SiteCondition parse_site_condition(std::string_view text) {
  auto t = ascii_lower(text);
  if (t == "online") return SiteCondition::Online;
  if (t == "offline") return SiteCondition::Offline;
  if (t == "robots-blocked" || t == "blocked" || t == "robotsblocked") return SiteCondition::RobotsBlocked;
  throw InputError("unknown site condition '" + std::string(text) + "' (online|offline|robots-blocked)");
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string html_unescape(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool replaced = false;
    if (s[i] == '&')
      for (auto [ent, c] : kEntities)
        if (s.substr(i, ent.size()) == ent) {
          out += c;
          i += ent.size();
          replaced = true;
          break;
        }
    if (!replaced) out += s[i++];
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CompiledPage CompiledPage::compile(std::string_view text) {
  CompiledPage page;
  std::string literal;
  std::size_t i = 0;
  while (i < text.size()) {
    auto open = text.find("{{", i);
    if (open == std::string_view::npos) {
      literal.append(text.substr(i));
      break;
    }
    literal.append(text.substr(i, open - i));
    auto close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated placeholder");
    auto inner = trim(text.substr(open + 2, close - open - 2));
    int slot = 0;
    if (inner.size() >= 3 && inner.size() <= 4 && inner.rfind("CT", 0) == 0 &&
        std::all_of(inner.begin() + 2, inner.end(), [](char c) { return c >= '0' && c <= '9'; }))
      slot = std::stoi(inner.substr(2));
    if (slot < 1 || slot > kSlotsPerSite) throw ConfigError("invalid placeholder '{{ " + inner + " }}'");
    page.parts.push_back({std::move(literal), 0});
    literal.clear();
    page.parts.push_back({{}, slot});
    i = close + 2;
  }
  page.parts.push_back({std::move(literal), 0});
  return page;
}

std::string CompiledPage::render(const std::map<int, std::string>& values) const {
  std::string out;
  for (const auto& p : parts) {
    if (p.slot == 0) {
      out += p.literal;
      continue;
    }
    auto it = values.find(p.slot);
    if (it == values.end()) throw InputError("assignment has no value for " + slot_name(p.slot));
    out += html_escape(it->second);
  }
  return out;
}

SiteTemplate::SiteTemplate(std::string site_id, std::map<std::string, std::string> pages, SiteProfile profile)
    : site_id_(std::move(site_id)), pages_(std::move(pages)), profile_(std::move(profile)) {
  if (site_id_.empty()) throw ConfigError("site id is empty");
  if (pages_.empty()) throw ConfigError("site '" + site_id_ + "' has no pages");
  std::set<int> seen;
  for (const auto& [key, text] : pages_) {
    try {
      auto page = CompiledPage::compile(text);
      for (const auto& p : page.parts)
        if (p.slot) seen.insert(p.slot);
      compiled_.emplace(key, std::move(page));
    } catch (const ConfigError& e) {
      throw ConfigError("site '" + site_id_ + "' page '" + key + "': " + e.what());
    }
  }
  for (int slot = 1; slot <= kSlotsPerSite; ++slot) {
    if (!seen.contains(slot))
      throw ConfigError("site '" + site_id_ + "': no page uses placeholder " + slot_name(slot));
    auto it = profile_.slots.find(slot);
    if (it == profile_.slots.end() || trim(it->second.question).empty())
      throw ConfigError("site '" + site_id_ + "': missing question for " + slot_name(slot));
    if (it->second.space_id.empty())
      throw ConfigError("site '" + site_id_ + "': missing value space for " + slot_name(slot));
  }
  if (profile_.slots.size() != kSlotsPerSite)
    throw ConfigError("site '" + site_id_ + "': profile declares slots outside CT1..CT10");
  if (trim(profile_.entity_name).empty()) throw ConfigError("site '" + site_id_ + "': entity_name is empty");
  if (trim(profile_.entity_description).empty())
    throw ConfigError("site '" + site_id_ + "': entity_description is empty");
  auto has_placeholder = [](std::string_view s) { return s.find("{{") != std::string_view::npos; };
  bool leaked = has_placeholder(profile_.entity_name) || has_placeholder(profile_.entity_description);
  for (const auto& [_, s] : profile_.slots) leaked = leaked || has_placeholder(s.question);
  if (leaked) throw ConfigError("site '" + site_id_ + "': profile text contains a placeholder");
}

std::optional<std::string> SiteTemplate::resolve(std::string_view path) const {
  auto q = path.find_first_of("?#");
  std::string p(path.substr(0, q));
  while (!p.empty() && p.front() == '/') p.erase(0, 1);
  if (p.empty() || p.back() == '/') p += "index";
  if (p.size() > 5 && p.ends_with(".html")) p.resize(p.size() - 5);
  if (pages_.contains(p)) return p;
  return std::nullopt;
}

std::string SiteTemplate::render(const TokenAssignment& a, std::string_view path) const {
  if (a.site_id != site_id_) throw InputError("assignment for '" + a.site_id + "' used on '" + site_id_ + "'");
  auto key = resolve(path);
  if (!key) throw NotFoundError("no page '" + std::string(path) + "' on site '" + site_id_ + "'");
  return compiled_.at(*key).render(a.values);
}

std::optional<std::map<int, std::string>> SiteTemplate::recover_values(std::string_view path,
                                                                       std::string_view page_text) const {
  auto key = resolve(path);
  if (!key) return std::nullopt;
  std::string stripped;
  if (auto m = page_text.find(kInterlinkMarker); m != std::string_view::npos) {
    auto end = page_text.find("</div>\n", m);
    if (end != std::string_view::npos) {
      stripped = std::string(page_text.substr(0, m)) + std::string(page_text.substr(end + 7));
      page_text = stripped;
    }
  }
  const auto& parts = compiled_.at(*key).parts;
  std::map<int, std::string> values;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = parts[i];
    if (part.slot == 0) {
      if (page_text.substr(pos, part.literal.size()) != part.literal) return std::nullopt;
      pos += part.literal.size();
      continue;
    }
    // Placeholders are always followed by a (possibly empty) literal part.
    const auto& next = parts[i + 1].literal;
    std::size_t end = next.empty() ? (i + 2 < parts.size() ? std::string_view::npos : page_text.size())
                                   : page_text.find(next, pos);
    // Adjacent placeholders have no recoverable split point.
    if (end == std::string_view::npos) return std::nullopt;
    auto v = html_unescape(page_text.substr(pos, end - pos));
    auto [it, fresh] = values.emplace(part.slot, v);
    if (!fresh && it->second != v) return std::nullopt;
    pos = end;
  }
  return values;
}

std::string SiteTemplate::static_text() const {
  std::string out = profile_.entity_name + "\n" + profile_.entity_description + "\n";
  for (const auto& [_, s] : profile_.slots) out += s.question + "\n";
  for (const auto& [_, page] : compiled_)
    for (const auto& p : page.parts)
      if (p.slot == 0) out += p.literal + "\n";
  return out;
}

std::map<int, std::string> SiteTemplate::slot_spaces() const {
  std::map<int, std::string> out;
  for (const auto& [slot, s] : profile_.slots) out[slot] = s.space_id;
  return out;
}

SiteProfile parse_site_profile(std::string_view toml_text, const std::string& origin) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  SiteProfile p;
  p.entity_name = tbl["entity_name"].value_or(std::string{});
  p.entity_description = tbl["entity_description"].value_or(std::string{});
  if (auto hosts = tbl["hosts"].as_array())
    for (const auto& h : *hosts)
      if (auto s = h.value<std::string>()) p.hosts.push_back(ascii_lower(*s));
  if (auto host = tbl["host"].value<std::string>()) p.hosts.push_back(ascii_lower(*host));
  auto slots = tbl["slots"].as_table();
  if (!slots) throw ConfigError(origin + ": missing [slots] table");
  for (const auto& [k, v] : *slots) {
    std::string name(k.str());
    int slot = 0;
    if (name.size() >= 3 && name.rfind("CT", 0) == 0) {
      try {
        slot = std::stoi(name.substr(2));
      } catch (const std::exception&) {
        slot = 0;
      }
    }
    if (slot < 1 || slot > kSlotsPerSite || slot_name(slot) != name)
      throw ConfigError(origin + ": unknown slot '" + name + "'");
    auto t = v.as_table();
    if (!t) throw ConfigError(origin + ": slots." + name + " must be a table");
    p.slots[slot] = SlotProfile{(*t)["question"].value_or(std::string{}), (*t)["space"].value_or(std::string{})};
  }
  return p;
}

SiteTemplate load_site_template(const std::filesystem::path& dir) {
  auto id = dir.filename().string();
  auto profile = parse_site_profile(read_file(dir / "profile.toml"), (dir / "profile.toml").string());
  std::map<std::string, std::string> pages;
  auto pages_dir = dir / "pages";
  if (!std::filesystem::is_directory(pages_dir)) throw ConfigError("site '" + id + "' has no pages/ directory");
  for (const auto& entry : std::filesystem::recursive_directory_iterator(pages_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".html") continue;
    auto rel = std::filesystem::relative(entry.path(), pages_dir).generic_string();
    rel.resize(rel.size() - 5);
    pages.emplace(rel, read_file(entry.path()));
  }
  return SiteTemplate(id, std::move(pages), std::move(profile));
}

std::vector<SiteTemplate> load_site_templates(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw ConfigError("templates directory " + root.string() + " missing");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<SiteTemplate> out;
  for (const auto& d : dirs) out.push_back(load_site_template(d));
  return out;
}

std::string render_site(const SiteTemplate& t, const TokenAssignment& a, std::string_view path) {
  return t.render(a, path);
}

std::optional<std::string> robots_txt(SiteCondition condition) {
  if (condition == SiteCondition::RobotsBlocked) return std::string(kRobotsDisallowAll);
  return std::nullopt;
}

std::string inject_hidden_links(std::string_view page, const std::vector<std::string>& peer_urls) {
  if (peer_urls.empty() || page.find(kInterlinkMarker) != std::string_view::npos) return std::string(page);
  std::string block(kInterlinkMarker);
  block += "\n<div style=\"position:absolute;left:-10000px;top:auto;width:1px;height:1px;overflow:hidden\">";
  for (const auto& url : peer_urls) block += "<a href=\"" + html_escape(url) + "\" tabindex=\"-1\">" + html_escape(url) + "</a>";
  block += "</div>\n";
  std::string out(page);
  auto body = out.rfind("</body>");
  if (body == std::string::npos)
    out += block;
  else
    out.insert(body, block);
  return out;
}

}  // namespace canary
