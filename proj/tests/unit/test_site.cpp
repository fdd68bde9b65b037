#include "doctest.h"

#include <atomic>
#include <set>
#include <thread>

#include <httplib.h>

#include "canary/canary_server.hpp"
#include "canary/error.hpp"
#include "canary/http_frontend.hpp"
#include "canary/site_stats.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

const Timestamp kNow = parse_rfc3339("2025-03-01T12:00:00Z");

struct Fixture {
  std::shared_ptr<TokenStore> store = std::make_shared<TokenStore>();
  std::shared_ptr<AsnResolver> asn = std::make_shared<AsnResolver>();
  std::shared_ptr<MemoryVisitSink> visits = std::make_shared<MemoryVisitSink>([] { return kNow; });
  std::shared_ptr<MemoryVisitSink> misc = std::make_shared<MemoryVisitSink>([] { return kNow; });
  std::unique_ptr<CanaryServer> server;

  explicit Fixture(bool interlink = true) {
    testutil::register_builtins(*store);
    AsnDatabase db;
    db.add(Prefix::parse("198.51.100.0/24"), 64501);
    db.add(Prefix::parse("203.0.113.0/24"), 64502);
    asn->swap(std::move(db));
    ServerOptions opts;
    opts.interlink = interlink;
    server = std::make_unique<CanaryServer>(load_site_templates(testutil::source_dir() + "/sites"), store, asn,
                                            visits, misc, opts, [] { return kNow; });
  }

  HttpResponse get(const std::string& host, const std::string& path, const std::string& ua = "TestBot/1.0",
                   const std::string& ip = "198.51.100.7") {
    return server->handle_request({host, path, ip, ua});
  }
};

const char* kHost = "lanternfold-archive.example";

}  // namespace

TEST_CASE("placeholders compile and render") {
  auto page = CompiledPage::compile("a {{ CT1 }} b {{CT10}} c");
  CHECK(page.render({{1, "X"}, {10, "Y"}}) == "a X b Y c");
  CHECK_THROWS_AS(CompiledPage::compile("{{ CT11 }}"), ConfigError);
  CHECK_THROWS_AS(CompiledPage::compile("{{ CT1"), ConfigError);
  CHECK_THROWS_AS(page.render({{1, "X"}}), InputError);
}

TEST_CASE("shipped templates load and round-trip their values") {
  auto sites = load_site_templates(testutil::source_dir() + "/sites");
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].site_id() == "lanternfold-archive");
  TokenStore store;
  testutil::register_builtins(store);
  for (const auto& s : sites) {
    store.register_site(s.site_id(), s.slot_spaces(), s.static_text());
    for (int i = 0; i < 20; ++i) {
      auto a = store.get_or_create(s.site_id(), {"UA" + std::to_string(i), 1}, kNow).assignment;
      std::map<int, std::string> recovered;
      for (const auto& [key, _] : s.pages()) {
        auto path = key == "index" ? std::string("/") : "/" + key + ".html";
        if (key.find('/') != std::string::npos) path = "/" + key.substr(0, key.rfind('/')) + "/";
        REQUIRE(s.resolve(path));
        auto html = s.render(a, path);
        auto got = s.recover_values(path, inject_hidden_links(html, {"https://x.example/"}));
        REQUIRE(got);
        for (const auto& [slot, v] : *got) {
          CHECK(v == a.values.at(slot));
          recovered[slot] = v;
        }
      }
      CHECK(recovered == a.values);
    }
  }
  CHECK_FALSE(sites[0].resolve("/missing.html"));
  CHECK(sites[0].resolve("/about"));
  TokenAssignment foreign{"other", {"UA", 1}, {}, kNow};
  CHECK_THROWS_AS(sites[0].render(foreign, "/"), InputError);
}

TEST_CASE("profile parsing rejects incomplete sites") {
  std::string base = "entity_name = \"X\"\nentity_description = \"y\"\n[slots.CT1]\nquestion = \"q\"\nspace = \"title\"\n";
  auto p = parse_site_profile(base, "t");
  CHECK(p.slots.size() == 1);
  CHECK_THROWS_AS(parse_site_profile(base + "[slots.CT11]\nquestion = \"q\"\nspace = \"title\"\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_site_profile("entity_name = \n", "t"), ConfigError);
  CHECK_THROWS_AS(SiteTemplate("s", {{"index", "{{ CT1 }}"}}, p), ConfigError);
}

TEST_CASE("hidden links are injected once") {
  auto out = inject_hidden_links("<html><body>x</body></html>", {"https://a.example/", "https://b.example/"});
  CHECK(out.find(kInterlinkMarker) != std::string::npos);
  CHECK(out.find("https://b.example/") < out.find("</body>"));
  CHECK(inject_hidden_links(out, {"https://c.example/"}) == out);
}

TEST_CASE("server serves tokens per fingerprint and logs visits") {
  Fixture f;
  auto r1 = f.get(kHost, "/");
  auto r2 = f.get(kHost, "/about.html");
  auto r3 = f.get(kHost, "/", "OtherBot/2.0");
  CHECK(r1.status == 200);
  CHECK(r2.status == 200);
  CHECK(r1.body != r3.body);
  CHECK(r1.body.find("quorrel") != std::string::npos);  // interlink to the peer site
  auto a = f.store->find("lanternfold-archive", {"TestBot/1.0", 64501});
  REQUIRE(a);
  CHECK(r1.body.find(a->values.at(1)) != std::string::npos);
  CHECK(f.get("unknown.example", "/").status == 404);
  CHECK(f.get("", "/lanternfold-archive/about.html").status == 200);
  auto v = f.visits->records();
  REQUIRE(v.size() == 4);
  CHECK(v[0].assignment_created);
  CHECK_FALSE(v[1].assignment_created);
  CHECK(v[0].asn == 64501);
  CHECK(v[0].source_ip_hash == hash_source_ip("canary", "198.51.100.7"));
  CHECK(v[0].source_ip_hash.size() == 64);
  CHECK(f.misc->records().size() == 1);
  CHECK(f.get(kHost, "/", "UA", "bogus-ip").status == 400);
}

TEST_CASE("conditions gate responses without minting tokens") {
  Fixture f;
  CHECK(f.get(kHost, "/robots.txt").status == 404);
  CHECK(f.server->set_condition("lanternfold-archive", SiteCondition::Offline));
  CHECK_FALSE(f.server->set_condition("lanternfold-archive", SiteCondition::Offline));
  CHECK(f.get(kHost, "/").status == 404);
  CHECK(f.get(kHost, "/robots.txt").status == 404);
  CHECK(f.server->set_condition("lanternfold-archive", SiteCondition::RobotsBlocked));
  auto robots = f.get(kHost, "/robots.txt");
  CHECK(robots.status == 200);
  CHECK(robots.body == kRobotsDisallowAll);
  CHECK(f.get(kHost, "/").status == 200);  // blocking is advisory
  CHECK(f.store->size() == 1);
  auto t = f.server->transitions();
  REQUIRE(t.size() == 2);
  CHECK(t[0].to == SiteCondition::Offline);
  CHECK(t[1].from == SiteCondition::Offline);
  auto v = f.visits->records();
  CHECK(v[1].condition == SiteCondition::Offline);
  CHECK(v[1].status == 404);
  CHECK_FALSE(v[1].assignment_created);
  CHECK_THROWS_AS(f.server->set_condition("nope", SiteCondition::Online), NotFoundError);
  CHECK(parse_site_condition("blocked") == SiteCondition::RobotsBlocked);
  CHECK_THROWS_AS(parse_site_condition("down"), InputError);
}

TEST_CASE("concurrent requests agree on assignments") {
  Fixture f(false);
  constexpr int kThreads = 8, kPerThread = 125;
  std::vector<std::thread> threads;
  std::vector<std::vector<std::string>> bodies(kThreads);
  for (int t = 0; t < kThreads; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < kPerThread; ++i)
        bodies[static_cast<std::size_t>(t)].push_back(f.get(kHost, "/", "Bot/" + std::to_string(i % 25)).body);
    });
  for (auto& th : threads) th.join();
  std::map<std::string, std::set<std::string>> per_ua;
  for (int t = 0; t < kThreads; ++t)
    for (int i = 0; i < kPerThread; ++i) per_ua["Bot/" + std::to_string(i % 25)].insert(bodies[t][i]);
  for (const auto& [_, b] : per_ua) CHECK(b.size() == 1);
  CHECK(f.store->size() == 25);
  auto v = f.visits->records();
  CHECK(v.size() == kThreads * kPerThread);
  CHECK(std::count_if(v.begin(), v.end(), [](const VisitRecord& r) { return r.assignment_created; }) == 25);
}

TEST_CASE("visit log shards per day and round-trips") {
  testutil::TempDir dir;
  Timestamp t = parse_rfc3339("2025-03-01T23:59:59Z");
  {
    JsonlVisitLog log(dir.path(), "visits", [&] { return t; });
    VisitRecord r{{}, "s", "h", "/", "abc", "UA \"q\"", 7, SiteCondition::RobotsBlocked, 200, true};
    log.append(r);
    t += std::chrono::seconds(2);
    log.append(r);
  }
  CHECK(std::filesystem::exists(dir / "visits-2025-03-01.jsonl"));
  CHECK(std::filesystem::exists(dir / "visits-2025-03-02.jsonl"));
  auto all = read_visit_log(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].user_agent == "UA \"q\"");
  CHECK(all[1].condition == SiteCondition::RobotsBlocked);
  CHECK(all[0].timestamp < all[1].timestamp);
  CHECK(visit_from_json(visit_to_json(all[0])) == all[0]);
  testutil::spit(dir / "visits-2025-03-03.jsonl", "{not json\n");
  CHECK_THROWS_AS(read_visit_log(dir.path()), DataIntegrityError);
}

TEST_CASE("sink timestamps never decrease") {
  Timestamp t = kNow;
  MemoryVisitSink sink([&] { return t; });
  sink.append({});
  t -= std::chrono::seconds(5);
  sink.append({});
  auto r = sink.records();
  CHECK(r[1].timestamp >= r[0].timestamp);
}

TEST_CASE("site stats shape") {
  std::vector<VisitRecord> log;
  auto add = [&](const std::string& site, const std::string& ua, std::uint32_t asn) {
    VisitRecord v;
    v.site_id = site;
    v.user_agent = ua;
    v.asn = asn;
    log.push_back(v);
  };
  add("a", "UA1", 1);
  add("a", "UA1", 2);
  add("a", "UA2", 1);
  add("b", "UA1", 1);
  add("", "zzz", 9);
  auto s = site_stats(log);
  CHECK(s.per_site.size() == 2);
  CHECK(s.min == DistinctCounts{1, 1, 1});
  CHECK(s.max == DistinctCounts{2, 2, 3});
  CHECK(s.avg == DistinctCounts{1.5, 1.5, 2});
  CHECK(s.all == DistinctCounts{2, 2, 3});
  auto csv = site_stats_csv(s);
  CHECK(csv.find("Min across sites") != std::string::npos);
  CHECK(csv.find("1.50") != std::string::npos);
  CHECK(site_stats_json(s).find("\"all\"") != std::string::npos);
  CHECK(site_stats({}).per_site.empty());
}

TEST_CASE("HTTP frontend serves pages and guards admin endpoints") {
  Fixture f;
  HttpFrontend front(*f.server, [] { return std::string("{}"); });
  int port = front.bind("127.0.0.1", 0);
  std::thread loop([&] { front.listen_after_bind(); });
  httplib::Client cli("127.0.0.1", port);
  httplib::Headers h{{"Host", kHost}, {"User-Agent", "FrontBot/1"}};
  auto page = cli.Get("/", h);
  REQUIRE(page);
  CHECK(page->status == 200);
  auto bad = cli.Post("/admin/condition", R"({"site_id":"lanternfold-archive","condition":"nope"})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto ok = cli.Post("/admin/condition", R"({"site_id":"lanternfold-archive","condition":"offline"})",
                     "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  CHECK(f.server->condition("lanternfold-archive") == SiteCondition::Offline);
  auto off = cli.Get("/", h);
  REQUIRE(off);
  CHECK(off->status == 404);
  auto stats = cli.Get("/admin/stats");
  REQUIRE(stats);
  CHECK(stats->body == "{}");
  front.stop();
  loop.join();
  CHECK(parse_listen_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK(parse_listen_address("[::1]:9") == std::pair<std::string, int>{"::1", 9});
  CHECK(parse_listen_address(":80").second == 80);
}
