#include "canary/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "json.hpp"

#include "canary/builtin_spaces.hpp"
#include "canary/error.hpp"
#include "canary/interaction.hpp"
#include "canary/normalize.hpp"
#include "canary/prompts.hpp"

namespace canary {

using nlohmann::json;

bool robots_disallows_all(std::string_view body) {
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto end = body.find('\n', pos);
    auto line = body.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    std::string t;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') t += c;
    if (ascii_lower(t) == "disallow:/") return true;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return false;
}

std::vector<SiteTemplate> scenario_sites(const Scenario& scenario) {
  if (!scenario.templates_dir.empty()) return load_site_templates(scenario.templates_dir);
  std::vector<SiteTemplate> out;
  for (int i = 0; i < scenario.synthetic_sites; ++i) out.push_back(synthetic_site(i, scenario.synthetic_slot_spaces));
  return out;
}

namespace {

std::string page_path(const std::string& key) { return key == "index" ? "/" : "/" + key + ".html"; }

// Everything one fetch of a site produced, as a scraper or cache holds it.
struct SiteCopy {
  ScraperFingerprint fp;
  Timestamp fetched_at{};
  std::map<int, std::string> values;
};

struct ScraperState {
  const ScraperBehavior* behavior = nullptr;
  int index = 0;
  std::size_t next_ua = 0;
  std::uint64_t requests = 0;
  std::set<std::string> gave_up;
};

const char* kMonths[] = {"January", "February", "March",     "April",   "May",      "June",
                         "July",    "August",   "September", "October", "November", "December"};

std::string with_commas(const std::string& digits) {
  std::string out;
  auto n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[i];
    auto left = n - i - 1;
    if (left > 0 && left % 3 == 0) out += ',';
  }
  return out;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Chatbots rarely echo numbers in the requested format.
std::string render_value(const std::string& v, SpaceKind kind, Rng& rng) {
  if (!rng.chance(0.5)) return v;
  if (kind == SpaceKind::Number && all_digits(v) && v.size() > 3) return with_commas(v);
  if (kind == SpaceKind::Date && v.size() == 10 && v[4] == '-' && v[7] == '-') {
    int month = std::stoi(v.substr(5, 2));
    int day = std::stoi(v.substr(8, 2));
    if (month >= 1 && month <= 12) return std::string(kMonths[month - 1]) + " " + std::to_string(day) + ", " + v.substr(0, 4);
  }
  if (kind == SpaceKind::Phone && v.size() == 12 && v[3] == '-' && v[7] == '-')
    return "(" + v.substr(0, 3) + ") " + v.substr(4);
  return v;
}

class Simulation;

class SimChatbot : public ChatbotClient {
 public:
  SimChatbot(Simulation& sim, const ChatbotWiring& wiring) : sim_(sim), wiring_(wiring) {}
  const std::string& chatbot_id() const override { return wiring_.id; }
  Transport transport() const override { return Transport::Simulated; }
  std::unique_ptr<ChatSession> open_session() override;

 private:
  Simulation& sim_;
  const ChatbotWiring& wiring_;
};

class Simulation {
 public:
  explicit Simulation(const Scenario& s) : scenario_(s), rng_(mix64(s.seed ^ 0x5eed5eed5eedULL)) {
    auto sites = scenario_sites(s);
    for (const auto& site : sites) result_.site_ids.push_back(site.site_id());
    result_.scenario = s;
    result_.plan = s.plan_toml.empty() ? default_campaign_plan(result_.site_ids, s.start)
                                       : parse_campaign_plan(s.plan_toml, result_.site_ids, "scenario campaign");

    for (std::size_t i = 0; i < s.scrapers.size(); ++i) {
      Prefix p = Prefix::parse("10." + std::to_string(i + 1) + ".0.0/16");
      result_.asn_db.add(p, s.scrapers[i].asn);
      scrapers_[s.scrapers[i].id] = ScraperState{&s.scrapers[i], static_cast<int>(i), 0, 0, {}};
    }

    TokenPolicy policy;
    policy.scope = s.exclusion_scope;
    policy.secret_key = "simulation-" + std::to_string(s.seed);
    result_.store = std::make_shared<TokenStore>(policy);
    for (const auto& spec : builtin_space_specs()) result_.store->register_space(build_value_space(spec));
    for (const auto& spec : s.spaces) result_.store->register_space(build_value_space(spec));

    visits_ = std::make_shared<MemoryVisitSink>(clock());
    misc_ = std::make_shared<MemoryVisitSink>(clock());
    ServerOptions options;
    options.link_scheme = "https";
    server_ = std::make_unique<CanaryServer>(std::move(sites), result_.store,
                                             std::make_shared<AsnResolver>(result_.asn_db), visits_, misc_,
                                             options, clock());
    for (const auto& id : result_.site_ids) {
      const auto* site = server_->site(id);
      by_name_.emplace_back(site->profile().entity_name, site);
    }
    // Longest names first so one name that prefixes another cannot shadow it.
    std::sort(by_name_.begin(), by_name_.end(),
              [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  Clock clock() {
    return [this] { return now_; };
  }

  SimulationResult run() {
    struct Event {
      Timestamp at;
      int priority;  // conditions, then crawls, then queries
      std::size_t seq;
      std::function<void()> fn;
    };
    std::vector<Event> events;
    std::size_t seq = 0;
    auto rounds = due_rounds(result_.plan, Timestamp::max(), {});
    Timestamp end = result_.plan.start;
    for (const auto& r : rounds) end = std::max(end, r.due_at);

    for (const auto& stage : result_.plan.stages)
      for (const auto& g : stage.groups)
        for (const auto& site : g.sites)
          events.push_back({result_.plan.start + stage.start, 0, seq++,
                            [this, site, c = g.condition] { server_->set_condition(site, c); }});

    for (auto& [id, st] : scrapers_) {
      const auto& b = *st.behavior;
      if (!b.crawl_interval) continue;
      auto at = scenario_.start + hours(st.index + 1);
      for (; at <= end; at += *b.crawl_interval)
        events.push_back({at, 1, seq++, [this, &st] { crawl(st); }});
    }

    std::map<std::string, std::unique_ptr<SimChatbot>> bots;
    for (const auto& w : scenario_.chatbots) bots[w.id] = std::make_unique<SimChatbot>(*this, w);
    InteractionIdGenerator ids("sim" + std::to_string(scenario_.seed));
    for (const auto& r : rounds) {
      std::size_t k = 0;
      for (const auto& w : scenario_.chatbots)
        for (const auto& site_id : r.sites) {
          auto at = r.due_at + std::chrono::minutes(static_cast<long long>(k++));
          events.push_back({at, 2, seq++, [this, &bots, &ids, r, site_id, id = w.id] {
                              auto& bot = *bots.at(id);
                              current_interaction_ = ids.next();
                              auto result = run_interaction(bot, *server_->site(site_id), r.round_label, r.condition,
                                                            current_interaction_, nullptr, clock());
                              result_.responses.push_back(result.primary);
                              if (result.followup) result_.responses.push_back(*result.followup);
                            }});
        }
    }

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      return std::tie(a.at, a.priority, a.seq) < std::tie(b.at, b.priority, b.seq);
    });
    for (auto& e : events) {
      now_ = e.at;
      e.fn();
    }

    result_.visits = visits_->records();
    result_.misc = misc_->records();
    result_.transitions = server_->transitions();
    compute_delivered();
    return std::move(result_);
  }

  // Live fetch of every page; nullopt when robots.txt or a status code
  // stops the scraper.
  std::optional<SiteCopy> fetch(ScraperState& st, const SiteTemplate& site) {
    const auto& b = *st.behavior;
    const auto& ua = b.user_agents[st.next_ua];
    if (b.rotate) st.next_ua = (st.next_ua + 1) % b.user_agents.size();
    const auto& host = site.profile().hosts.empty() ? std::string{} : site.profile().hosts.front();
    auto send = [&](const std::string& path) {
      auto c = st.requests++;
      HttpRequest req;
      req.host = host;
      req.path = host.empty() ? "/" + site.site_id() + path : path;
      req.user_agent = ua;
      req.source_ip = "10." + std::to_string(st.index + 1) + "." + std::to_string((c / 250) % 250) + "." +
                      std::to_string(c % 250 + 1);
      return server_->handle_request(req);
    };
    if (b.respects_robots) {
      auto robots = send("/robots.txt");
      if (robots.status == 200 && robots_disallows_all(robots.body)) return std::nullopt;
    }
    SiteCopy copy;
    copy.fp = ScraperFingerprint{ua, b.asn};
    copy.fetched_at = now_;
    for (const auto& [key, _] : site.pages()) {
      auto path = page_path(key);
      auto resp = send(path);
      if (resp.status != 200) return std::nullopt;
      auto values = site.recover_values(path, resp.body);
      if (!values) throw DataIntegrityError("served page " + site.site_id() + path + " does not match its template");
      for (auto& [slot, v] : *values) copy.values[slot] = v;
    }
    return copy;
  }

  void crawl(ScraperState& st) {
    const auto& b = *st.behavior;
    for (const auto& id : result_.site_ids) {
      if (st.gave_up.contains(id)) continue;
      auto copy = fetch(st, *server_->site(id));
      if (!copy) {
        if (!b.revisit_when_offline && server_->condition(id) == SiteCondition::Offline) st.gave_up.insert(id);
        continue;
      }
      if (b.fetch_mode == FetchMode::FeedsSearchCache) search_caches_[b.cache_id][id] = std::move(*copy);
    }
  }

  // Content a chatbot can draw on for one site, one entry per usable source.
  std::vector<SiteCopy> gather(const ChatbotWiring& w, const std::string& site_id) {
    std::vector<SiteCopy> out;
    bool signals_clear = server_->condition(site_id) == SiteCondition::Online;
    for (const auto& src : w.sources) {
      if (src.kind == SourceRef::Kind::Cache) {
        if (w.respects_blocking_signals && !signals_clear) continue;
        auto& cache = search_caches_[src.id];
        if (auto it = cache.find(site_id); it != cache.end()) out.push_back(it->second);
        continue;
      }
      auto live = fetch(scrapers_.at(src.id), *server_->site(site_id));
      auto key = std::make_tuple(w.id, src.id, site_id);
      if (live) {
        if (w.caches_content) private_caches_[key] = *live;
        out.push_back(std::move(*live));
        continue;
      }
      if (!w.caches_content || (w.respects_blocking_signals && !signals_clear)) continue;
      if (auto it = private_caches_.find(key); it != private_caches_.end() && now_ - it->second.fetched_at <= w.cache_ttl)
        out.push_back(it->second);
    }
    return out;
  }

  const SiteTemplate* site_named_in(const std::string& prompt, std::string_view lead) {
    auto pos = prompt.find(lead);
    if (pos == std::string::npos) return nullptr;
    auto rest = std::string_view(prompt).substr(pos + lead.size());
    for (const auto& [name, site] : by_name_)
      if (rest.substr(0, name.size()) == name) return site;
    return nullptr;
  }

  std::string answer(const ChatbotWiring& w, const std::string& interaction_id, int query_index,
                     const SiteTemplate& site, const SiteCopy* content) {
    const auto& name = site.profile().entity_name;
    std::string out = query_index == 1 ? "Here is what I found about " + name + ".\n"
                                       : (content ? "I found another page about " + name + ".\n"
                                                  : "I could not find any variant websites about " + name + ".\n");
    for (const auto& [slot, prof] : site.profile().slots) {
      auto binding = result_.store->binding(site.site_id(), slot);
      const ValueSpace* space = binding ? result_.store->space(binding->space_id) : nullptr;
      EmittedToken tok{w.id, interaction_id, query_index, site.site_id(), slot, {}, std::nullopt};
      if (space && rng_.chance(w.hallucination_prob)) {
        tok.value = space->sample(rng_);
      } else if (content && !rng_.chance(scenario_.omission_prob)) {
        auto it = content->values.find(slot);
        if (it != content->values.end()) {
          tok.value = it->second;
          tok.source = content->fp;
        }
      }
      if (tok.value.empty()) {
        if (content) out += prof.question + " I could not find this.\n";
        continue;
      }
      out += prof.question + " " + render_value(tok.value, binding ? binding->kind : SpaceKind::Word, rng_) + ".\n";
      result_.emitted.push_back(std::move(tok));
    }
    if (content) result_.truth.sources[w.id].insert(content->fp);
    return out;
  }

  void compute_delivered() {
    auto index = TokenIndex::build(*result_.store);
    std::set<std::tuple<std::string, std::string, ScraperFingerprint, std::string, int, std::string>> seen;
    for (const auto& t : result_.emitted) {
      if (!t.source) continue;
      const auto* v = index.find(normalize_response(t.value));
      if (!v || v->flags.duplicate || v->flags.cross_variable || v->flags.subset_member || v->flags.numeric) continue;
      bool owned = false;
      for (const auto& o : v->owners)
        if (o.fingerprint == *t.source && o.site_id == t.site_id && o.slot_id == t.slot_id && !is_numeric_kind(o.kind))
          owned = true;
      if (!owned) continue;
      if (seen.emplace(t.chatbot_id, t.interaction_id, *t.source, t.site_id, t.slot_id, v->key).second)
        ++result_.truth.delivered[{t.chatbot_id, *t.source}];
    }
  }

  friend class SimSession;

 private:
  const Scenario& scenario_;
  Rng rng_;
  Timestamp now_{};
  SimulationResult result_;
  std::map<std::string, ScraperState> scrapers_;
  std::shared_ptr<MemoryVisitSink> visits_;
  std::shared_ptr<MemoryVisitSink> misc_;
  std::unique_ptr<CanaryServer> server_;
  std::vector<std::pair<std::string, const SiteTemplate*>> by_name_;
  std::map<std::string, std::map<std::string, SiteCopy>> search_caches_;
  std::map<std::tuple<std::string, std::string, std::string>, SiteCopy> private_caches_;
  std::string current_interaction_;
};

// Reads the entity name out of the prompt, like a real assistant would, and
// answers from whatever its sources hold.
class SimSession : public ChatSession {
 public:
  SimSession(Simulation& sim, const ChatbotWiring& w) : sim_(sim), w_(w) {}

  std::string send(const std::string& prompt) override {
    const auto& interaction = sim_.current_interaction_;
    if (++turn_ == 1) {
      site_ = sim_.site_named_in(prompt, "Can you tell me about ");
      if (!site_) throw TransportError("simulated chatbot could not parse the prompt");
      content_ = sim_.gather(w_, site_->site_id());
      return sim_.answer(w_, interaction, 1, *site_, content_.empty() ? nullptr : &content_[0]);
    }
    if (!site_ || !sim_.site_named_in(prompt, "variant websites about ")) throw TransportError("unexpected follow-up");
    const SiteCopy* c = content_.size() > 1 ? &content_[1] : (content_.empty() ? nullptr : &content_[0]);
    return sim_.answer(w_, interaction, 2, *site_, c);
  }

 private:
  Simulation& sim_;
  const ChatbotWiring& w_;
  int turn_ = 0;
  const SiteTemplate* site_ = nullptr;
  std::vector<SiteCopy> content_;
};

std::unique_ptr<ChatSession> SimChatbot::open_session() { return std::make_unique<SimSession>(sim_, wiring_); }

}  // namespace

SimulationResult run_scenario(const Scenario& scenario) {
  validate_scenario(scenario);
  Simulation sim(scenario);
  return sim.run();
}

}  // namespace canary

namespace canary {

namespace {

json fp_json(const ScraperFingerprint& fp) { return {{"user_agent", fp.user_agent}, {"asn", fp.asn}}; }

ScraperFingerprint fp_from(const json& j) {
  return {j.at("user_agent").get<std::string>(), j.at("asn").get<std::uint32_t>()};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string ground_truth_to_json(const GroundTruth& g) {
  json sources = json::object();
  for (const auto& [chatbot, fps] : g.sources) {
    auto& arr = sources[chatbot] = json::array();
    for (const auto& fp : fps) arr.push_back(fp_json(fp));
  }
  json delivered = json::array();
  for (const auto& [key, n] : g.delivered) {
    auto j = fp_json(key.second);
    j["chatbot_id"] = key.first;
    j["tokens"] = n;
    delivered.push_back(std::move(j));
  }
  return json{{"sources", sources}, {"delivered", delivered}}.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(std::string_view text) {
  GroundTruth g;
  try {
    auto j = json::parse(text);
    for (const auto& [chatbot, arr] : j.at("sources").items())
      for (const auto& fp : arr) g.sources[chatbot].insert(fp_from(fp));
    for (const auto& d : j.at("delivered"))
      g.delivered[{d.at("chatbot_id").get<std::string>(), fp_from(d)}] = d.at("tokens").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ground truth: ") + e.what());
  }
  return g;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ground_truth_from_json(text);
}

void write_simulation(const SimulationResult& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "visits");
  for (const auto& entry : fs::directory_iterator(dir / "visits"))
    if (entry.path().extension() == ".jsonl") fs::remove(entry.path());
  auto shard = [&](const std::vector<VisitRecord>& records, const std::string& prefix) {
    std::map<std::string, std::string> days;
    for (const auto& v : records) days[utc_date(v.timestamp)] += visit_to_json(v) + "\n";
    for (const auto& [day, text] : days) write_file(dir / "visits" / (prefix + "-" + day + ".jsonl"), text);
  };
  shard(r.visits, "visits");
  if (!r.misc.empty()) {
    fs::create_directories(dir / "misc");
    std::map<std::string, std::string> days;
    for (const auto& v : r.misc) days[utc_date(v.timestamp)] += visit_to_json(v) + "\n";
    for (const auto& [day, text] : days) write_file(dir / "misc" / ("misc-" + day + ".jsonl"), text);
  }

  std::string responses;
  for (const auto& rec : r.responses) responses += response_to_json(rec) + "\n";
  write_file(dir / "responses.jsonl", responses);

  std::string transitions;
  for (const auto& t : r.transitions)
    transitions += json{{"timestamp", to_rfc3339(t.at)},
                        {"site_id", t.site_id},
                        {"from", std::string(to_string(t.from))},
                        {"to", std::string(to_string(t.to))}}
                       .dump() +
                   "\n";
  write_file(dir / "transitions.jsonl", transitions);

  fs::remove_all(dir / "store");
  {
    TokenStore disk(dir / "store", TokenPolicy{r.scenario.exclusion_scope, "simulation-" + std::to_string(r.scenario.seed)});
    for (const auto& spec : builtin_space_specs()) disk.register_space(build_value_space(spec));
    for (const auto& spec : r.scenario.spaces) disk.register_space(build_value_space(spec));
    for (const auto& site : r.site_ids) {
      std::map<int, std::string> spaces;
      for (int slot = 1; slot <= kSlotsPerSite; ++slot)
        if (auto b = r.store->binding(site, slot)) spaces[slot] = b->space_id;
      disk.register_site(site, spaces);
    }
    for (const auto& a : r.store->assignments()) disk.import_assignment(a);
    disk.compact();
  }

  std::string asn;
  for (const auto& e : r.asn_db.entries()) asn += e.prefix.to_string() + "\t" + std::to_string(e.asn) + "\n";
  write_file(dir / "asn.tsv", asn);
  write_file(dir / "ground_truth.json", ground_truth_to_json(r.truth));
  write_file(dir / "agents.toml", agent_lists_toml(r.scenario.agents));
}

Analysis analyze(const SimulationResult& result, const InferenceOptions& options) {
  auto index = TokenIndex::build(*result.store);
  Analysis out;
  for (const auto& rec : result.responses) {
    auto hits = extract_tokens(rec, index);
    out.hits.insert(out.hits.end(), hits.begin(), hits.end());
  }
  auto filtered = filter_hits(out.hits, index);
  out.hits = filtered.accepted;
  out.hits.insert(out.hits.end(), filtered.discarded.begin(), filtered.discarded.end());
  out.inference = infer(out.hits, result.responses, options);
  return out;
}

Evaluation evaluate_inference(const GroundTruth& truth, const InferenceResult& inference, std::uint64_t min_tokens) {
  Evaluation e;
  std::set<ChatbotFingerprint> attributed;
  for (std::size_t i = 0; i < inference.evidence.size(); ++i)
    if (inference.verdicts[i].decision) attributed.insert({inference.evidence[i].chatbot_id, inference.evidence[i].fingerprint});
  e.attributed = attributed.size();
  for (const auto& key : attributed) {
    auto it = truth.sources.find(key.first);
    if (it == truth.sources.end() || !it->second.contains(key.second)) e.false_positives.push_back(key);
  }
  std::size_t found = 0;
  for (const auto& [key, n] : truth.delivered) {
    if (n < min_tokens) continue;
    ++e.eligible;
    if (attributed.contains(key))
      ++found;
    else
      e.false_negatives.push_back(key);
  }
  if (e.attributed) e.precision = double(e.attributed - e.false_positives.size()) / double(e.attributed);
  if (e.eligible) e.recall = double(found) / double(e.eligible);
  return e;
}

}  // namespace canary
