#include <httplib.h>

#include "json.hpp"

#include "canary/canary_server.hpp"
#include "canary/error.hpp"
#include "canary/http_frontend.hpp"
#include "canary/site_stats.hpp"
#include "cli/context.hpp"

namespace canary::cli {

namespace {

std::shared_ptr<TokenStore> open_store(const ProjectConfig& cfg, const std::filesystem::path& dir) {
  auto store = std::make_shared<TokenStore>(dir, cfg.tokens);
  for (auto& space : config_spaces(cfg)) store->register_space(std::move(space));
  return store;
}

void add_serve(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("serve", "Serve the canary sites and log every visit");
  auto listen = std::make_shared<std::string>();
  cmd->add_option("--listen", *listen, "host:port (overrides server.listen)");
  cmd->callback([&ctx, listen] {
    ctx.action = [&ctx, listen] {
      auto cfg = ctx.config();
      auto sites = load_site_templates(cfg.templates_dir);
      auto store = open_store(cfg, cfg.store_dir);
      auto asn = std::make_shared<AsnResolver>(cfg.asn_db.empty() ? AsnDatabase{} : AsnDatabase::load(cfg.asn_db));
      auto visits = std::make_shared<JsonlVisitLog>(cfg.visits_dir, "visits", system_clock());
      auto misc = std::make_shared<JsonlVisitLog>(cfg.misc_dir, "misc", system_clock());
      ServerOptions options;
      options.ip_salt = cfg.ip_salt;
      options.interlink = cfg.interlink;
      options.transition_log = cfg.transitions_path;
      if (!options.transition_log.empty()) std::filesystem::create_directories(options.transition_log.parent_path());
      CanaryServer server(std::move(sites), store, asn, visits, misc, options, system_clock());
      auto visits_dir = cfg.visits_dir;
      HttpFrontend frontend(server, [visits_dir] { return site_stats_json(site_stats(read_visit_log(visits_dir))); });
      auto [host, port] = parse_listen_address(listen->empty() ? cfg.listen : *listen);
      int bound = frontend.bind(host, port);
      ctx.out << "serving " << server.site_ids().size() << " sites on " << host << ":" << bound << std::endl;
      frontend.listen_after_bind();
      return 0;
    };
  });
}

void add_condition(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("condition", "Change a site's condition on a running server");
  auto* set = cmd->add_subcommand("set", "Set online, offline or robots-blocked");
  cmd->require_subcommand(1);
  struct Opts {
    std::string site, condition, server = "http://127.0.0.1:8080";
  };
  auto o = std::make_shared<Opts>();
  set->add_option("site", o->site, "Site id")->required();
  set->add_option("condition", o->condition, "online | offline | robots-blocked")->required();
  set->add_option("--server", o->server, "Base URL of the running server (loopback)");
  set->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cond = parse_site_condition(o->condition);
      httplib::Client client(o->server);
      client.set_connection_timeout(5);
      nlohmann::json body{{"site_id", o->site}, {"condition", std::string(to_string(cond))}};
      auto res = client.Post("/admin/condition", body.dump(), "application/json");
      if (!res) throw TransportError("cannot reach " + o->server + ": " + httplib::to_string(res.error()));
      if (res->status == 404) throw NotFoundError("unknown site '" + o->site + "'");
      if (res->status != 200)
        throw TransportError("server answered " + std::to_string(res->status) + ": " + res->body);
      auto j = nlohmann::json::parse(res->body);
      ctx.out << o->site << ": " << j.value("condition", o->condition)
              << (j.value("changed", false) ? "" : " (unchanged)") << "\n";
      return 0;
    };
  });
}

void add_stats(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("stats", "Distinct user agents, ASNs and visitors over the visit log");
  struct Opts {
    std::string visits;
    std::string format;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--visits", o->visits, "Visit log file or directory");
  cmd->add_option("--format", o->format, "text | csv | json (default: text, or --output)")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto stats = site_stats(read_visit_log(pick(o->visits, cfg.visits_dir)));
      auto format = o->format;
      if (format.empty()) format = ctx.output.empty() ? "text" : (ctx.jsonl() ? "json" : "csv");
      if (format == "text")
        ctx.out << site_stats_text(stats);
      else if (format == "csv")
        ctx.out << site_stats_csv(stats);
      else
        ctx.out << site_stats_json(stats) << "\n";
      return 0;
    };
  });
}

}  // namespace

void add_server_commands(CLI::App& app, Context& ctx) {
  add_serve(app, ctx);
  add_condition(app, ctx);
  add_stats(app, ctx);
}

}  // namespace canary::cli
