#include "doctest.h"

#include <sstream>

#include "canary/cli.hpp"
#include "canary/response_store.hpp"
#include "json.hpp"
#include "mock_adapter.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

struct Run {
  int rc;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int rc = run_cli(args, out, err);
  return {rc, out.str(), err.str()};
}

const char* kScenario = R"(
seed = 3
omission_prob = 0.0
caches = ["idx"]
[sites]
synthetic = 4
[[scrapers]]
id = "fetch"
user_agent = "FetchBot/1.0"
asn = 64700
[[chatbots]]
id = "A"
sources = ["scraper:fetch"]
)";

std::string config_text(const std::filesystem::path& root, int adapter_port) {
  auto src = testutil::source_dir();
  std::ostringstream c;
  c << "[paths]\ntemplates = \"" << src << "/sites\"\nstore = \"" << (root / "store").string() << "\"\nvisits = \""
    << (root / "visits").string() << "\"\nresponses = \"" << (root / "responses").string() << "\"\nasn_db = \"" << src
    << "/deploy/asn.tsv\"\nplan = \"" << src << "/deploy/campaign.toml\"\n"
    << "[campaign]\npoliteness_delay = \"0s\"\n"
    << "[[chatbots]]\nid = \"Claude\"\ntransport = \"browser-adapter\"\nhost = \"127.0.0.1\"\nport = " << adapter_port
    << "\ntimeout = \"5s\"\n";
  return c.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).rc == 2);
  CHECK(cli({"no-such-command"}).rc == 2);
  CHECK(cli({"infer"}).rc == 2);
  CHECK(cli({"--output", "xml", "export"}).rc == 2);
  CHECK(cli({"--help"}).rc == 0);
}

TEST_CASE("configuration errors exit 2") {
  testutil::TempDir dir;
  testutil::spit(dir / "bad.toml", "[inference]\nt = 0\n");
  CHECK(cli({"--config", (dir / "bad.toml").string(), "audit"}).rc == 2);
  testutil::spit(dir / "broken.toml", "[paths\n");
  auto r = cli({"--config", (dir / "broken.toml").string(), "audit"});
  CHECK(r.rc == 2);
  CHECK(r.err.find("line") != std::string::npos);
  CHECK(cli({"--config", (dir / "missing.toml").string(), "audit"}).rc == 2);
  testutil::spit(dir / "s.toml", "seed = 1\n[[chatbots]]\nid = \"A\"\nsources = []\n");
  CHECK(cli({"simulate", "--scenario", (dir / "s.toml").string()}).rc == 2);
}

TEST_CASE("simulate, extract, infer, report and evaluate end to end") {
  testutil::TempDir dir;
  testutil::spit(dir / "s.toml", kScenario);
  auto sim = dir / "sim";
  auto r = cli({"simulate", "--scenario", (dir / "s.toml").string(), "--out", sim.string()});
  REQUIRE(r.rc == 0);
  CHECK(r.out.find("false positives 0") != std::string::npos);
  auto store = (sim / "store").string(), responses = (sim / "responses.jsonl").string(),
       hits = (dir / "hits.jsonl").string();
  REQUIRE(cli({"extract", "--store", store, "--responses", responses, "--out", hits}).rc == 0);
  auto inf = cli({"infer", "--hits", hits, "--responses", responses, "--breakdown", (dir / "b.csv").string()});
  REQUIRE(inf.rc == 0);
  CHECK(inf.out.rfind("chatbot_id,user_agent", 0) == 0);
  CHECK(inf.out.find("\"FetchBot/1.0\",64700") != std::string::npos);
  CHECK(testutil::slurp(dir / "b.csv").rfind("category,", 0) == 0);
  CHECK(cli({"infer", "--hits", hits, "--responses", responses, "--t", "0"}).rc == 2);
  CHECK(cli({"infer", "--hits", hits, "--responses", responses, "--variant", "fuzzy"}).rc == 2);
  auto rep = cli({"report", "--hits", hits, "--responses", responses, "--agents", (sim / "agents.toml").string()});
  CHECK(rep.rc == 0);
  CHECK(rep.out.find("FetchBot") != std::string::npos);
  auto ev = cli({"evaluate", "--ground-truth", (sim / "ground_truth.json").string(), "--hits", hits, "--responses",
                 responses, "--strict"});
  CHECK(ev.rc == 0);
  CHECK(cli({"stats", "--visits", (sim / "visits").string(), "--format", "csv"}).out.find("Min across sites") !=
        std::string::npos);
  auto exp = cli({"--output", "jsonl", "export", "--store", store, "--site", "site-01"});
  CHECK(exp.rc == 0);
  CHECK(exp.out.find("\"site_id\":\"site-01\"") != std::string::npos);
  CHECK(exp.out.find("site-02") == std::string::npos);
  CHECK(cli({"audit", "--store", store}).rc == 0);
  CHECK(cli({"extract", "--store", (dir / "nostore").string(), "--responses", responses}).rc != 0);
}

TEST_CASE("campaign status, dry run and a run through the adapter") {
  testutil::TempDir dir;
  testutil::MockAdapter mock([](const nlohmann::json& f) {
    return nlohmann::json{{"job_id", f["job_id"]}, {"status", "ok"}, {"raw_text", "Nothing found."}}.dump();
  });
  auto cfg = (dir / "canary.toml").string();
  testutil::spit(cfg, config_text(dir.path(), mock.port()));
  auto status = cli({"--config", cfg, "campaign", "status", "--now", "2025-03-10T00:00:00Z"});
  REQUIRE(status.rc == 0);
  CHECK(status.out.find("baseline") != std::string::npos);
  auto dry = cli({"--config", cfg, "campaign", "run", "--now", "2025-03-10T00:00:00Z", "--dry-run"});
  CHECK(dry.rc == 0);
  CHECK(dry.out.find("baseline Claude lanternfold-archive") != std::string::npos);
  auto run = cli({"--config", cfg, "campaign", "run", "--now", "2025-03-10T00:00:00Z", "--round", "baseline"});
  CHECK(run.rc == 0);
  auto responses = read_responses(dir / "responses");
  CHECK(responses.size() == 4);
  CHECK(mock.frames().size() == 4);
  auto again = cli({"--config", cfg, "campaign", "run", "--now", "2025-03-10T00:00:00Z", "--round", "baseline"});
  CHECK(again.out.find("no rounds due") != std::string::npos);

  testutil::spit(dir / "t.txt", "Query 1: hi\nResponse 1: Nothing.\n");
  auto imp = cli({"--config", cfg, "probe", "import", "--chatbot", "Grok", "--site", "lanternfold-archive", "--round",
                  "baseline", "--transcript", (dir / "t.txt").string()});
  CHECK(imp.rc == 0);
  CHECK(read_responses(dir / "responses").size() == 5);
  CHECK(cli({"--config", cfg, "probe", "import", "--chatbot", "Grok", "--site", "nope", "--round", "baseline",
             "--transcript", (dir / "t.txt").string()})
            .rc != 0);
}
