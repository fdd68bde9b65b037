#include <fstream>

#include "canary/cli.hpp"
#include "canary/error.hpp"
#include "cli/context.hpp"

namespace canary {

namespace cli {

ProjectConfig Context::config() const {
  if (config_path.empty()) return ProjectConfig{};
  return load_project_config(config_path);
}

std::filesystem::path pick(const std::string& override_value, const std::filesystem::path& configured) {
  return override_value.empty() ? configured : std::filesystem::path(override_value);
}

CampaignPlan project_plan(const ProjectConfig& c, const std::vector<std::string>& site_ids) {
  if (!c.plan_path.empty()) return load_campaign_plan(c.plan_path, site_ids);
  if (!c.campaign_start) throw ConfigError("no campaign plan: set paths.plan or campaign.start in the config");
  return default_campaign_plan(site_ids, *c.campaign_start);
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

}  // namespace cli

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  cli::Context ctx{out, err, {}, {}, {}};
  CLI::App app{"Canary-token toolkit for attributing AI web scrapers", "canaryctl"};
  app.require_subcommand(1);
  app.add_option("--config", ctx.config_path, "Project config (TOML)");
  app.add_option("--output", ctx.output, "Tabular output format")->check(CLI::IsMember({"csv", "jsonl"}));
  cli::add_server_commands(app, ctx);
  cli::add_campaign_commands(app, ctx);
  cli::add_analysis_commands(app, ctx);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (!ctx.action) {
    err << app.help();
    return 2;
  }
  try {
    return ctx.action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << "\n";
    return 5;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace canary
