#include "doctest.h"

#include <cmath>
#include <set>

#include "canary/error.hpp"
#include "canary/simulator.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

Scenario baseline(std::uint64_t seed = 0) {
  auto s = load_scenario(testutil::source_dir() + "/scenarios/baseline.toml");
  s.seed = seed;
  return s;
}

const char* kSmall = R"(
seed = 1
caches = ["idx"]
[sites]
synthetic = 4
[[scrapers]]
id = "fetch"
user_agent = "FetchBot/1.0"
asn = 64700
[[scrapers]]
id = "crawl"
user_agent = "CrawlBot/1.0"
asn = 64701
fetch_mode = "feeds_search_cache"
cache = "idx"
crawl_interval = "4d"
[[chatbots]]
id = "A"
sources = ["scraper:fetch"]
[[chatbots]]
id = "B"
sources = ["cache:idx"]
)";

std::map<std::string, std::string> rounds_by_interaction(const SimulationResult& r) {
  std::map<std::string, std::string> m;
  for (const auto& resp : r.responses) m[resp.interaction_id] = resp.round_label;
  return m;
}

}  // namespace

TEST_CASE("scenario parsing and validation") {
  auto s = parse_scenario(kSmall);
  CHECK(s.synthetic_sites == 4);
  CHECK(s.scrapers[1].fetch_mode == FetchMode::FeedsSearchCache);
  CHECK(s.scrapers[1].crawl_interval == days(4));
  CHECK(s.chatbots[1].sources[0].kind == SourceRef::Kind::Cache);
  std::string text = kSmall;
  auto broken = [&](const std::string& from, const std::string& to) {
    auto t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  CHECK_THROWS_AS(parse_scenario(broken("sources = [\"scraper:fetch\"]", "sources = []")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("scraper:fetch", "scraper:nope")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("cache:idx", "scraper:crawl")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("crawl_interval = \"4d\"", "")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("id = \"B\"", "id = \"B\"\nhallucination_prob = 1.5")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("id = \"crawl\"", "id = \"fetch\"")), ConfigError);
  CHECK_THROWS_AS(parse_scenario(broken("synthetic = 4", "synthetic = 0")), ConfigError);
  CHECK_THROWS_AS(parse_scenario("seed = \n"), ConfigError);
  auto agents = parse_agent_lists("[agents]\nsearch_families = [\"Googlebot\"]\n[agents.declared]\nX = [\"XBot\"]\n");
  CHECK(agents.search_families.contains("Googlebot"));
  CHECK(parse_agent_lists(agent_lists_toml(agents)).declared == agents.declared);
}

TEST_CASE("synthetic sites are well formed") {
  std::set<std::string> names;
  for (int i = 0; i < 64; ++i) {
    auto s = synthetic_site(i, kSyntheticSlotSpaces);
    names.insert(s.profile().entity_name);
    CHECK(s.profile().hosts.at(0) == s.site_id() + ".example");
  }
  CHECK(names.size() == 64);
}

TEST_CASE("runs are deterministic per seed") {
  auto a = run_scenario(parse_scenario(kSmall));
  auto b = run_scenario(parse_scenario(kSmall));
  CHECK(a.responses == b.responses);
  CHECK(a.visits == b.visits);
  CHECK(a.store->assignments() == b.store->assignments());
  auto s = parse_scenario(kSmall);
  s.seed = 2;
  auto c = run_scenario(s);
  CHECK(a.responses != c.responses);
  CHECK(ground_truth_to_json(ground_truth_from_json(ground_truth_to_json(a.truth))) == ground_truth_to_json(a.truth));
}

TEST_CASE("without noise attribution is exact") {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    auto s = baseline(seed);
    s.omission_prob = 0;
    for (auto& c : s.chatbots) c.hallucination_prob = 0;
    auto r = run_scenario(s);
    auto e = evaluate_inference(r.truth, analyze(r).inference);
    CAPTURE(seed);
    CHECK(e.exact());
    CHECK(e.precision == 1.0);
    CHECK(e.recall == 1.0);
    CHECK(e.attributed > 0);
  }
}

TEST_CASE("robots-respecting scrapers fetch nothing but robots.txt while blocked") {
  auto r = run_scenario(baseline());
  std::set<std::string> respecting;
  for (const auto& sc : r.scenario.scrapers)
    if (sc.respects_robots)
      for (const auto& ua : sc.user_agents) respecting.insert(ua);
  std::size_t blocked_visits = 0, ignoring_content = 0;
  for (const auto& v : r.visits) {
    if (v.condition != SiteCondition::RobotsBlocked) continue;
    if (respecting.contains(v.user_agent)) {
      ++blocked_visits;
      CHECK(v.path == "/robots.txt");
      CHECK_FALSE(v.assignment_created);
    } else if (v.path != "/robots.txt") {
      ++ignoring_content;
    }
  }
  CHECK(blocked_visits > 0);
  CHECK(ignoring_content > 0);
}

TEST_CASE("cached content survives offline sites; signal-respecting bots drop it") {
  auto r = run_scenario(baseline());
  auto rounds = rounds_by_interaction(r);
  std::map<std::string, std::size_t> sourced_offline;
  for (const auto& t : r.emitted)
    if (t.source && rounds[t.interaction_id].find("offline") != std::string::npos) ++sourced_offline[t.chatbot_id];
  CHECK(sourced_offline["ChatGPT"] > 0);
  CHECK(sourced_offline["Gemini"] > 0);
  CHECK(sourced_offline["Duck.ai"] == 0);
  for (const auto& resp : r.responses)
    if (resp.chatbot_id == "Duck.ai" && resp.condition != SiteCondition::Online && resp.query_index == 1)
      for (const auto& t : r.emitted)
        if (t.interaction_id == resp.interaction_id) CHECK_FALSE(t.source);
}

TEST_CASE("a rotating scraper shows up as five fingerprints") {
  auto r = run_scenario(baseline());
  std::set<std::string> uas;
  for (const auto& v : r.visits)
    if (v.asn == 64604) uas.insert(v.user_agent);
  CHECK(uas.size() == 5);
  CHECK(r.truth.sources.at("Kimi").size() == 5);
  auto inf = analyze(r).inference;
  std::set<ScraperFingerprint> kimi;
  for (const auto& v : inf.verdicts)
    if (v.chatbot_id == "Kimi" && v.decision) kimi.insert(v.fingerprint);
  CHECK(kimi.size() == 5);
}

TEST_CASE("hallucinated draws hit a given value at rate 1/|V|") {
  auto space = build_value_space({"v", SpaceKind::Word, IntegerRangeSource{1, 1000}, 0});
  Rng rng(2024);
  constexpr int kSlots = 100'000;
  int hits = 0;
  for (int i = 0; i < kSlots; ++i) hits += space.sample(rng) == "417";
  double p = 1.0 / 1000, mean = kSlots * p, se = std::sqrt(kSlots * p * (1 - p));
  CHECK(std::abs(hits - mean) <= 3 * se);
}

TEST_CASE("pure hallucination never yields an attribution") {
  std::string text = kSmall;
  text += R"(
[[spaces]]
id = "huge"
kind = "word"
pattern = "QzXXXXXXXXvk"
)";
  auto base = parse_scenario(text);
  base.synthetic_slot_spaces = std::vector<std::string>(kSlotsPerSite, "huge");
  for (auto& c : base.chatbots) c.hallucination_prob = 1.0;
  std::size_t emitted = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = base;
    s.seed = seed;
    auto r = run_scenario(s);
    emitted += r.emitted.size();
    for (const auto& t : r.emitted) CHECK_FALSE(t.source);
    auto e = evaluate_inference(r.truth, analyze(r).inference);
    CHECK(e.false_positives.empty());
    CHECK(e.attributed == 0);
  }
  CHECK(emitted > 1000);
}

TEST_CASE("simulation output feeds the file-based tools") {
  testutil::TempDir dir;
  auto r = run_scenario(parse_scenario(kSmall));
  write_simulation(r, dir.path());
  for (const auto* f : {"responses.jsonl", "ground_truth.json", "agents.toml", "asn.tsv", "store/assignments.log"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(read_responses(dir / "responses.jsonl") == r.responses);
  CHECK(read_visit_log(dir / "visits").size() == r.visits.size());
  TokenStore reopened(dir / "store", {});
  CHECK(reopened.assignments() == r.store->assignments());
  CHECK(ground_truth_to_json(read_ground_truth(dir / "ground_truth.json")) == ground_truth_to_json(r.truth));
}

TEST_CASE("robots parsing") {
  CHECK(robots_disallows_all("User-agent: *\nDisallow: /\n"));
  CHECK(robots_disallows_all("user-agent: *\r\ndisallow:/\r\n"));
  CHECK_FALSE(robots_disallows_all("User-agent: *\nDisallow: /private\n"));
  CHECK_FALSE(robots_disallows_all(""));
}
