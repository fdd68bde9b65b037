#include "canary/scenario.hpp"

#include <set>
#include <sstream>

#include "canary/error.hpp"
#include "toml_support.hpp"

namespace canary {

std::string_view to_string(FetchMode m) { return m == FetchMode::Direct ? "direct" : "feeds_search_cache"; }

namespace {

FetchMode parse_fetch_mode(std::string_view s) {
  if (s == "direct") return FetchMode::Direct;
  if (s == "feeds_search_cache" || s == "feeds-search-cache") return FetchMode::FeedsSearchCache;
  throw ConfigError("unknown fetch_mode '" + std::string(s) + "' (direct, feeds_search_cache)");
}

SourceRef parse_source(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos || colon + 1 == s.size())
    throw ConfigError("source '" + s + "' must be scraper:<id> or cache:<id>");
  auto kind = s.substr(0, colon);
  SourceRef r;
  r.id = s.substr(colon + 1);
  if (kind == "scraper")
    r.kind = SourceRef::Kind::Scraper;
  else if (kind == "cache")
    r.kind = SourceRef::Kind::Cache;
  else
    throw ConfigError("source '" + s + "' must be scraper:<id> or cache:<id>");
  return r;
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(what + " must be within [0, 1]");
}

const std::vector<std::string> kNameHeads{"Velmora", "Quintar", "Osmeric", "Thallow",
                                          "Brisken", "Calderi", "Norrow", "Yselde"};
const std::vector<std::string> kNameTails{"Cooperative", "Archive",  "Guild",     "Observatory",
                                          "Society",     "Atelier",  "Institute", "Conservancy"};
const std::vector<std::string> kDescriptions{
    "a volunteer collective cataloguing handmade clocks",
    "a small studio restoring antique sailing charts",
    "a members club for amateur glass blowers",
    "a workshop building custom kite frames",
    "a reading circle devoted to forgotten almanacs",
    "an independent lab breeding heirloom moss",
    "a guild of letterpress printers",
    "a community archive of lighthouse logbooks"};

const std::vector<std::string> kQuestions{
    "What is the first name of its founder?",
    "What is the last name of its founder?",
    "In which town is its head office?",
    "In which town is its second office?",
    "What is the name of its parent company?",
    "What is the name of its flagship project?",
    "What is the title of its latest release?",
    "How many registered members does it have?",
    "On what date was it established?",
    "What is its contact phone number?"};

}  // namespace

const std::vector<std::string> kSyntheticSlotSpaces{"given-name", "surname", "place-name", "place-name", "org-name",
                                                    "title",      "title",   "number",     "date",       "phone"};

SiteTemplate synthetic_site(int index, const std::vector<std::string>& slot_spaces) {
  if (index < 0 || index >= 64) throw ConfigError("synthetic sites are numbered 0..63");
  const auto& spaces = slot_spaces.empty() ? kSyntheticSlotSpaces : slot_spaces;
  if (spaces.size() != static_cast<std::size_t>(kSlotsPerSite))
    throw ConfigError("synthetic slot_spaces needs exactly 10 entries");
  char num[8];
  std::snprintf(num, sizeof num, "%02d", index + 1);
  std::string id = std::string("site-") + num;

  SiteProfile profile;
  profile.entity_name = "The " + kNameHeads[static_cast<std::size_t>(index % 8)] + " " +
                        kNameTails[static_cast<std::size_t>(index / 8)];
  profile.entity_description = kDescriptions[static_cast<std::size_t>((index * 3) % 8)];
  profile.hosts = {id + ".example"};
  for (int s = 1; s <= kSlotsPerSite; ++s)
    profile.slots[s] = {kQuestions[static_cast<std::size_t>(s - 1)], spaces[static_cast<std::size_t>(s - 1)]};

  const auto& name = profile.entity_name;
  auto head = [&](const std::string& title) {
    return "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + title +
           "</title></head>\n<body>\n<h1>" + name + "</h1>\n";
  };
  std::map<std::string, std::string> pages;
  pages["index"] = head(name) + "<p>" + name + " is " + profile.entity_description +
                   ".</p>\n<p>Founded by <b>{{ CT1 }}</b> <b>{{ CT2 }}</b>.</p>\n"
                   "<p>Head office: <span>{{ CT3 }}</span></p>\n"
                   "<p>Flagship project: <em>{{ CT6 }}</em></p>\n</body></html>\n";
  pages["about"] = head("About") + "<ul>\n<li>Second office: <span>{{ CT4 }}</span></li>\n"
                   "<li>Parent company: <span>{{ CT5 }}</span></li>\n"
                   "<li>Latest release: <em>{{ CT7 }}</em></li>\n"
                   "<li>Registered members: <span>{{ CT8 }}</span></li>\n"
                   "<li>Established: <time>{{ CT9 }}</time></li>\n</ul>\n</body></html>\n";
  pages["contact"] = head("Contact") + "<p>Call us at <a>{{ CT10 }}</a>.</p>\n</body></html>\n";
  return SiteTemplate(id, std::move(pages), std::move(profile));
}

void validate_scenario(const Scenario& s) {
  check_probability(s.omission_prob, "omission_prob");
  std::set<std::string> caches;
  for (const auto& c : s.caches)
    if (!caches.insert(c).second) throw ConfigError("cache '" + c + "' declared twice");
  std::set<std::string> scrapers;
  for (const auto& sc : s.scrapers) {
    if (sc.id.empty()) throw ConfigError("a scraper needs an id");
    if (!scrapers.insert(sc.id).second) throw ConfigError("scraper '" + sc.id + "' declared twice");
    if (sc.user_agents.empty()) throw ConfigError("scraper '" + sc.id + "' has no user_agents");
    if (!sc.rotate && sc.user_agents.size() != 1)
      throw ConfigError("scraper '" + sc.id + "' lists several user_agents without ua_policy = \"rotate\"");
    if (sc.fetch_mode == FetchMode::FeedsSearchCache) {
      if (!caches.contains(sc.cache_id))
        throw ConfigError("scraper '" + sc.id + "' feeds unknown cache '" + sc.cache_id + "'");
      if (!sc.crawl_interval) throw ConfigError("scraper '" + sc.id + "' feeds a cache but has no crawl_interval");
    }
    if (sc.crawl_interval && sc.crawl_interval->count() <= 0)
      throw ConfigError("scraper '" + sc.id + "' crawl_interval must be positive");
  }
  if (s.scrapers.size() > 250) throw ConfigError("at most 250 scrapers");
  std::set<std::string> chatbots;
  for (const auto& c : s.chatbots) {
    if (c.id.empty()) throw ConfigError("a chatbot needs an id");
    if (!chatbots.insert(c.id).second) throw ConfigError("chatbot '" + c.id + "' declared twice");
    if (c.sources.empty()) throw ConfigError("chatbot '" + c.id + "' has an empty sources list");
    check_probability(c.hallucination_prob, "chatbot '" + c.id + "' hallucination_prob");
    for (const auto& src : c.sources) {
      bool ok = src.kind == SourceRef::Kind::Cache ? caches.contains(src.id) : scrapers.contains(src.id);
      if (!ok) throw ConfigError("chatbot '" + c.id + "' references unknown source '" + src.id + "'");
      if (src.kind == SourceRef::Kind::Scraper)
        for (const auto& sc : s.scrapers)
          if (sc.id == src.id && sc.fetch_mode != FetchMode::Direct)
            throw ConfigError("chatbot '" + c.id + "' uses scraper '" + src.id +
                              "' directly but it only feeds a cache");
    }
  }
  if (s.chatbots.empty()) throw ConfigError("scenario has no chatbots");
  if (s.templates_dir.empty() && (s.synthetic_sites < 1 || s.synthetic_sites > 64))
    throw ConfigError("synthetic site count must be within 1..64");
}

Scenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir,
                        const std::string& origin) {
  auto tbl = tomlu::parse(toml_text, origin);
  tomlu::View root{tbl};
  Scenario s;
  if (auto seed = root["seed"].value<std::int64_t>()) s.seed = static_cast<std::uint64_t>(*seed);
  s.omission_prob = tomlu::number(root["omission_prob"], s.omission_prob, "omission_prob");
  auto start = tomlu::timestamp(root["start"]);
  s.start = start ? *start : parse_rfc3339("2025-01-06T00:00:00Z");
  if (auto scope = root["exclusion_scope"].value<std::string>()) s.exclusion_scope = parse_exclusion_scope(*scope);

  if (auto sites = root["sites"].as_table()) {
    tomlu::View sv{*sites};
    if (auto n = sv["synthetic"].value<std::int64_t>()) s.synthetic_sites = static_cast<int>(*n);
    s.synthetic_slot_spaces = tomlu::strings(sv["slot_spaces"], "sites.slot_spaces");
    if (auto dir = sv["templates"].value<std::string>()) {
      s.templates_dir = *dir;
      if (s.templates_dir.is_relative()) s.templates_dir = base_dir / s.templates_dir;
    }
  }
  if (auto spaces = root["spaces"].as_array())
    for (const auto& n : *spaces) {
      auto t = n.as_table();
      if (!t) throw ConfigError(origin + ": [[spaces]] entries must be tables");
      s.spaces.push_back(tomlu::space_spec(*t, origin));
    }
  s.caches = tomlu::strings(root["caches"], "caches");

  if (auto arr = root["scrapers"].as_array())
    for (const auto& n : *arr) {
      auto t = n.as_table();
      if (!t) throw ConfigError(origin + ": [[scrapers]] entries must be tables");
      tomlu::View v{*t};
      ScraperBehavior b;
      b.id = v["id"].value_or(std::string{});
      b.user_agents = tomlu::strings(v["user_agents"], "scraper user_agents");
      if (auto ua = v["user_agent"].value<std::string>()) b.user_agents.push_back(*ua);
      auto policy = v["ua_policy"].value_or(std::string{"fixed"});
      if (policy != "fixed" && policy != "rotate")
        throw ConfigError(origin + ": scraper '" + b.id + "' ua_policy must be fixed or rotate");
      b.rotate = policy == "rotate";
      auto asn = v["asn"].value<std::int64_t>();
      if (!asn || *asn <= 0 || *asn > 0xFFFFFFFFLL) throw ConfigError(origin + ": scraper '" + b.id + "' needs an asn");
      b.asn = static_cast<std::uint32_t>(*asn);
      b.fetch_mode = parse_fetch_mode(v["fetch_mode"].value_or(std::string{"direct"}));
      b.cache_id = v["cache"].value_or(std::string{});
      b.respects_robots = v["respects_robots"].value_or(true);
      b.revisit_when_offline = v["revisit_when_offline"].value_or(true);
      if (auto ci = v["crawl_interval"].value<std::string>()) b.crawl_interval = parse_duration(*ci);
      s.scrapers.push_back(std::move(b));
    }

  if (auto arr = root["chatbots"].as_array())
    for (const auto& n : *arr) {
      auto t = n.as_table();
      if (!t) throw ConfigError(origin + ": [[chatbots]] entries must be tables");
      tomlu::View v{*t};
      ChatbotWiring c;
      c.id = v["id"].value_or(std::string{});
      if (!v["sources"]) throw ConfigError(origin + ": chatbot '" + c.id + "' has no sources");
      for (const auto& src : tomlu::strings(v["sources"], "chatbot sources")) c.sources.push_back(parse_source(src));
      c.caches_content = v["caches_content"].value_or(false);
      if (auto ttl = v["cache_ttl"].value<std::string>()) c.cache_ttl = parse_duration(*ttl);
      c.hallucination_prob = tomlu::number(v["hallucination_prob"], 0.0, "hallucination_prob");
      c.respects_blocking_signals = v["respects_blocking_signals"].value_or(false);
      s.chatbots.push_back(std::move(c));
    }

  if (auto agents = root["agents"].as_table()) s.agents = tomlu::agent_lists(*agents, origin);

  if (auto campaign = root["campaign"].as_table()) {
    toml::table copy = *campaign;
    if (!copy.contains("start")) copy.insert("start", to_rfc3339(s.start));
    std::ostringstream ss;
    ss << copy;
    s.plan_toml = ss.str();
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(tomlu::read_text(path), path.parent_path(), path.string());
}

AgentLists parse_agent_lists(std::string_view toml_text, const std::string& origin) {
  auto tbl = tomlu::parse(toml_text, origin);
  if (auto agents = tbl["agents"].as_table()) return tomlu::agent_lists(*agents, origin);
  return {};
}

std::string agent_lists_toml(const AgentLists& lists) {
  toml::table agents;
  toml::array families;
  for (const auto& f : lists.search_families) families.push_back(f);
  agents.insert("search_families", families);
  auto per_chatbot = [](const std::map<std::string, std::set<std::string>>& m) {
    toml::table t;
    for (const auto& [chatbot, fams] : m) {
      toml::array a;
      for (const auto& f : fams) a.push_back(f);
      t.insert(chatbot, a);
    }
    return t;
  };
  agents.insert("declared", per_chatbot(lists.declared));
  agents.insert("publicly_known", per_chatbot(lists.publicly_known));
  toml::table root;
  root.insert("agents", agents);
  std::ostringstream ss;
  ss << root << "\n";
  return ss.str();
}

}  // namespace canary
