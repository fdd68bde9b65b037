#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "json.hpp"

#include "canary/chatbot_client.hpp"
#include "canary/error.hpp"
#include "canary/interaction.hpp"
#include "cli/context.hpp"

namespace canary::cli {

namespace {

std::set<std::string> done_labels(const std::filesystem::path& responses) {
  std::set<std::string> out;
  if (!std::filesystem::exists(responses)) return out;
  for (const auto& r : read_responses(responses)) out.insert(r.round_label);
  return out;
}

std::vector<std::string> ids_of(const std::vector<SiteTemplate>& sites) {
  std::vector<std::string> out;
  for (const auto& s : sites) out.push_back(s.site_id());
  return out;
}

Timestamp now_or(const std::string& text) { return text.empty() ? now_utc() : parse_rfc3339(text); }

// A directory (or path without .jsonl) gets one shard per UTC day.
std::filesystem::path response_file(const std::filesystem::path& configured, Timestamp now) {
  if (configured.extension() == ".jsonl") return configured;
  return configured / ("responses-" + utc_date(now) + ".jsonl");
}

void post_condition(const std::string& server, const std::string& site, SiteCondition c) {
  httplib::Client client(server);
  client.set_connection_timeout(5);
  nlohmann::json body{{"site_id", site}, {"condition", std::string(to_string(c))}};
  auto res = client.Post("/admin/condition", body.dump(), "application/json");
  if (!res) throw TransportError("cannot reach " + server + ": " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("server answered " + std::to_string(res->status) + " for " + site);
}

void add_campaign(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("campaign", "Inspect or run the query campaign");
  cmd->require_subcommand(1);

  auto* status = cmd->add_subcommand("status", "Planned conditions and rounds still due");
  auto now_text = std::make_shared<std::string>();
  status->add_option("--now", *now_text, "Evaluate the plan at this time (RFC 3339)");
  status->callback([&ctx, now_text] {
    ctx.action = [&ctx, now_text] {
      auto cfg = ctx.config();
      auto ids = ids_of(load_site_templates(cfg.templates_dir));
      auto plan = project_plan(cfg, ids);
      auto now = now_or(*now_text);
      auto history = done_labels(cfg.responses_path);
      ctx.out << "now " << to_rfc3339(now) << "\n";
      for (const auto& id : ids) ctx.out << "  " << id << " " << to_string(planned_condition(plan, id, now)) << "\n";
      auto due = due_rounds(plan, now, history);
      ctx.out << "due rounds: " << due.size() << "\n";
      for (const auto& r : due)
        ctx.out << "  " << r.round_label << " (" << to_string(r.condition) << ", " << r.sites.size()
                << " sites, due " << to_rfc3339(r.due_at) << ")\n";
      std::size_t pending = 0;
      for (const auto& l : plan.round_labels())
        if (!history.contains(l)) ++pending;
      ctx.out << "completed " << history.size() << ", not yet completed " << pending << "\n";
      return 0;
    };
  });

  auto* run = cmd->add_subcommand("run", "Query every configured chatbot for the rounds that are due");
  struct RunOpts {
    std::string now, server, round;
    std::vector<std::string> chatbots;
    bool dry_run = false;
  };
  auto o = std::make_shared<RunOpts>();
  run->add_option("--now", o->now, "Treat this time as now (RFC 3339)");
  run->add_option("--server", o->server, "Apply the planned conditions to this running server first");
  run->add_option("--round", o->round, "Only this round label");
  run->add_option("--chatbot", o->chatbots, "Only these chatbots");
  run->add_flag("--dry-run", o->dry_run, "List the interactions without sending anything");
  run->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto sites = load_site_templates(cfg.templates_dir);
      auto plan = project_plan(cfg, ids_of(sites));
      auto now = now_or(o->now);
      if (!o->server.empty())
        for (const auto& s : sites) post_condition(o->server, s.site_id(), planned_condition(plan, s.site_id(), now));

      std::vector<std::unique_ptr<ChatbotClient>> clients;
      for (const auto& c : cfg.chatbots) {
        if (!o->chatbots.empty() && std::find(o->chatbots.begin(), o->chatbots.end(), c.id) == o->chatbots.end())
          continue;
        if (c.transport != Transport::Api && c.transport != Transport::BrowserAdapter) continue;
        clients.push_back(make_chatbot_client(c));
      }
      std::map<std::string, const SiteTemplate*> by_id;
      for (const auto& s : sites) by_id[s.site_id()] = &s;

      auto due = due_rounds(plan, now, done_labels(cfg.responses_path));
      if (!o->round.empty())
        std::erase_if(due, [&](const DueRound& r) { return r.round_label != o->round; });
      if (due.empty()) {
        ctx.out << "no rounds due\n";
        return 0;
      }
      if (o->dry_run) {
        for (const auto& r : due)
          for (const auto& c : clients)
            for (const auto& s : r.sites) ctx.out << r.round_label << " " << c->chatbot_id() << " " << s << "\n";
        return 0;
      }

      auto file = response_file(cfg.responses_path, now);
      std::filesystem::create_directories(file.parent_path());
      ResponseStore store(file);
      Dispatcher dispatcher(cfg.politeness_delay);
      InteractionIdGenerator ids(fresh_interaction_prefix());
      std::atomic<std::size_t> failures{0}, total{0};
      for (const auto& r : due) {
        std::vector<std::thread> lanes;
        for (auto& c : clients)
          lanes.emplace_back([&, client = c.get()] {
            for (const auto& s : r.sites) {
              auto result = dispatcher.run(*client, *by_id.at(s), r.round_label, r.condition, ids, &store);
              ++total;
              if (result.failed) ++failures;
            }
          });
        for (auto& t : lanes) t.join();
        ctx.out << "round " << r.round_label << " done\n";
      }
      ctx.out << total.load() << " interactions, " << failures.load() << " failed, written to " << file.string()
              << "\n";
      return failures.load() == 0 ? 0 : 4;
    };
  });
}

void add_probe(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("probe", "Record interactions made outside the automated clients");
  cmd->require_subcommand(1);
  auto* imp = cmd->add_subcommand("import", "Import a pasted transcript as a manual interaction");
  struct Opts {
    std::string chatbot, site, round, condition, transcript, interaction_id;
  };
  auto o = std::make_shared<Opts>();
  imp->add_option("--chatbot", o->chatbot, "Chatbot id")->required();
  imp->add_option("--site", o->site, "Site id the queries were about")->required();
  imp->add_option("--round", o->round, "Round label")->required();
  imp->add_option("--condition", o->condition, "Condition during the round (default: from the plan)");
  imp->add_option("--transcript", o->transcript, "Transcript file")->required();
  imp->add_option("--interaction-id", o->interaction_id, "Interaction id (default: generated)");
  imp->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      std::ifstream in(o->transcript, std::ios::binary);
      if (!in) throw InputError("cannot read " + o->transcript);
      std::stringstream ss;
      ss << in.rdbuf();
      auto turns = parse_transcript(ss.str());

      SiteCondition condition = SiteCondition::Online;
      if (!o->condition.empty()) {
        condition = parse_site_condition(o->condition);
      } else {
        auto sites = load_site_templates(cfg.templates_dir);
        auto plan = project_plan(cfg, ids_of(sites));
        auto c = round_condition(plan, o->site, o->round);
        if (!c) throw ConfigError("site '" + o->site + "' takes no part in round '" + o->round + "'");
        condition = *c;
      }
      auto now = now_utc();
      auto id = o->interaction_id.empty() ? InteractionIdGenerator(fresh_interaction_prefix()).next() : o->interaction_id;
      auto file = response_file(cfg.responses_path, now);
      std::filesystem::create_directories(file.parent_path());
      ResponseStore store(file);
      for (const auto& t : turns) {
        ResponseRecord r;
        r.chatbot_id = o->chatbot;
        r.site_id = o->site;
        r.interaction_id = id;
        r.query_index = t.index;
        r.condition = condition;
        r.round_label = o->round;
        r.raw_text = t.response;
        r.timestamp = now;
        r.transport = Transport::Manual;
        store.append(r);
      }
      ctx.out << "imported " << turns.size() << " responses as " << id << "\n";
      return 0;
    };
  });
}

}  // namespace

void add_campaign_commands(CLI::App& app, Context& ctx) {
  add_campaign(app, ctx);
  add_probe(app, ctx);
}

}  // namespace canary::cli
