#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "canary/audit.hpp"
#include "canary/error.hpp"
#include "canary/extraction.hpp"
#include "canary/inference.hpp"
#include "canary/report.hpp"
#include "canary/scenario.hpp"
#include "canary/simulator.hpp"
#include "cli/context.hpp"

namespace canary::cli {

namespace {

using nlohmann::json;

std::unique_ptr<TokenStore> existing_store(const ProjectConfig& cfg, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw InputError("no token store at " + dir.string());
  return std::make_unique<TokenStore>(dir, cfg.tokens);
}

struct Thresholds {
  std::optional<std::int64_t> t, w;
  std::string variant;

  void add(CLI::App* cmd) {
    cmd->add_option("--t", t, "Token threshold (>= 1)");
    cmd->add_option("--w", w, "Interaction threshold (>= 1)");
    cmd->add_option("--variant", variant, "default | literal");
  }
  InferenceOptions resolve(const ProjectConfig& cfg) const {
    auto o = cfg.inference;
    auto take = [](std::optional<std::int64_t> v, std::uint64_t& dst, const char* name) {
      if (!v) return;
      if (*v < 1) throw ConfigError(std::string("--") + name + " must be at least 1");
      dst = static_cast<std::uint64_t>(*v);
    };
    take(t, o.t, "t");
    take(w, o.w, "w");
    if (!variant.empty()) o.variant = parse_match_variant(variant);
    return o;
  }
};

std::string verdicts_jsonl(const InferenceResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.evidence.size(); ++i) {
    const auto& e = r.evidence[i];
    const auto& v = r.verdicts[i];
    out += json{{"chatbot_id", e.chatbot_id},
                {"user_agent", e.fingerprint.user_agent},
                {"asn", e.fingerprint.asn},
                {"ua_family", parse_user_agent(e.fingerprint.user_agent).family},
                {"T", e.T},
                {"W", e.W},
                {"sites", e.contributing_sites},
                {"decision", v.decision},
                {"variant", std::string(to_string(v.variant))},
                {"t", v.t},
                {"w", v.w}}
               .dump() +
           "\n";
  }
  return out;
}

std::vector<std::string> breakdown_columns(const ProjectConfig& cfg, const std::vector<ResponseRecord>& responses) {
  if (!cfg.plan_path.empty() || cfg.campaign_start) {
    std::vector<std::string> ids;
    for (const auto& s : load_site_templates(cfg.templates_dir)) ids.push_back(s.site_id());
    return project_plan(cfg, ids).round_labels();
  }
  std::vector<std::string> labels;
  for (const auto& l : kDefaultRoundLabels) labels.push_back(l);
  (void)responses;
  return labels;
}

AgentLists agents_from(const ProjectConfig& cfg, const std::string& path) {
  if (path.empty()) return cfg.agents;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_agent_lists(ss.str(), path);
}

void add_extract(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("extract", "Find canary tokens in the chatbot responses");
  struct Opts {
    std::string store, responses, out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--store", o->store, "Token store directory");
  cmd->add_option("--responses", o->responses, "Response log file or directory");
  cmd->add_option("--out", o->out, "Hits JSONL (default: stdout)");
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto store = existing_store(cfg, pick(o->store, cfg.store_dir));
      auto responses = read_responses(pick(o->responses, cfg.responses_path));
      auto index = TokenIndex::build(*store);
      std::vector<TokenHit> hits;
      for (const auto& r : responses) {
        auto h = extract_tokens(r, index);
        hits.insert(hits.end(), h.begin(), h.end());
      }
      auto filtered = filter_hits(std::move(hits), index);
      std::string text;
      for (const auto& h : filtered.accepted) text += hit_to_json(h) + "\n";
      for (const auto& h : filtered.discarded) text += hit_to_json(h) + "\n";
      write_text(o->out, text, ctx.out);
      if (!o->out.empty() && o->out != "-") {
        const auto& b = filtered.breakdown;
        ctx.out << b.total_found << " hits, " << filtered.accepted.size() << " accepted, "
                << b.confusion_numerical << " numerical, " << b.confusion_subsets << " subsets, " << b.token_overlap
                << " overlap\n";
      }
      return 0;
    };
  });
}

void add_infer(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("infer", "Score the evidence per chatbot and fingerprint");
  struct Opts {
    std::string hits, responses, out, breakdown;
    Thresholds thresholds;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--hits", o->hits, "Hits JSONL from extract")->required();
  cmd->add_option("--responses", o->responses, "Response log file or directory");
  cmd->add_option("--out", o->out, "Verdicts (default: stdout)");
  cmd->add_option("--breakdown", o->breakdown, "Write the discard breakdown CSV here");
  o->thresholds.add(cmd);
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto options = o->thresholds.resolve(cfg);
      auto responses = read_responses(pick(o->responses, cfg.responses_path));
      auto result = infer(read_hits(o->hits), responses, options);
      write_text(o->out, ctx.jsonl() ? verdicts_jsonl(result) : verdicts_csv(result), ctx.out);
      if (!o->breakdown.empty())
        write_text(o->breakdown, breakdown_csv(result.breakdown, breakdown_columns(cfg, responses)), ctx.out);
      return 0;
    };
  });
}

void add_report(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("report", "Attribution tables per chatbot and user-agent family");
  struct Opts {
    std::string hits, responses, agents, main_csv, offline_csv, blocking_csv;
    Thresholds thresholds;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--hits", o->hits, "Hits JSONL from extract")->required();
  cmd->add_option("--responses", o->responses, "Response log file or directory");
  cmd->add_option("--agents", o->agents, "TOML file with an [agents] table (default: config)");
  cmd->add_option("--main-csv", o->main_csv, "Write the condition table here");
  cmd->add_option("--offline-csv", o->offline_csv, "Write the offline round matrix here");
  cmd->add_option("--blocking-csv", o->blocking_csv, "Write the blocking round matrix here");
  o->thresholds.add(cmd);
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto responses = read_responses(pick(o->responses, cfg.responses_path));
      auto result = infer(read_hits(o->hits), responses, o->thresholds.resolve(cfg));
      auto report = build_report(result, responses, agents_from(cfg, o->agents));
      if (!o->main_csv.empty()) write_text(o->main_csv, report_main_csv(report), ctx.out);
      if (!o->offline_csv.empty()) write_text(o->offline_csv, report_matrix_csv(report.offline), ctx.out);
      if (!o->blocking_csv.empty()) write_text(o->blocking_csv, report_matrix_csv(report.blocking), ctx.out);
      ctx.out << report_text(report);
      return 0;
    };
  });
}

void print_evaluation(std::ostream& out, const Evaluation& e) {
  out << "attributed " << e.attributed << ", false positives " << e.false_positives.size() << ", eligible "
      << e.eligible << ", false negatives " << e.false_negatives.size() << "\n";
  out << std::fixed << std::setprecision(4) << "precision " << e.precision << ", recall " << e.recall << "\n";
  out.unsetf(std::ios::floatfield);
  for (const auto& [c, fp] : e.false_positives) out << "  false positive: " << c << " <- " << fp.to_string() << "\n";
  for (const auto& [c, fp] : e.false_negatives) out << "  false negative: " << c << " <- " << fp.to_string() << "\n";
}

void add_simulate(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("simulate", "Run a synthetic campaign with known ground truth");
  struct Opts {
    std::string scenario, out;
    std::optional<std::uint64_t> seed;
    Thresholds thresholds;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--scenario", o->scenario, "Scenario TOML")->required();
  cmd->add_option("--seed", o->seed, "Override the scenario seed");
  cmd->add_option("--out", o->out, "Write logs, store and ground truth to this directory");
  o->thresholds.add(cmd);
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto scenario = load_scenario(o->scenario);
      if (o->seed) scenario.seed = *o->seed;
      auto result = run_scenario(scenario);
      if (!o->out.empty()) write_simulation(result, o->out);
      auto analysis = analyze(result, o->thresholds.resolve(cfg));
      ctx.out << "seed " << scenario.seed << ": " << result.site_ids.size() << " sites, " << result.visits.size()
              << " visits, " << result.store->size() << " assignments, " << result.responses.size() << " responses\n";
      print_evaluation(ctx.out, evaluate_inference(result.truth, analysis.inference));
      return 0;
    };
  });
}

void add_evaluate(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("evaluate", "Compare verdicts against a simulation's ground truth");
  struct Opts {
    std::string truth, hits, responses;
    std::uint64_t min_tokens = 2;
    bool strict = false;
    Thresholds thresholds;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--ground-truth", o->truth, "ground_truth.json from simulate --out")->required();
  cmd->add_option("--hits", o->hits, "Hits JSONL from extract")->required();
  cmd->add_option("--responses", o->responses, "Response log file or directory");
  cmd->add_option("--min-tokens", o->min_tokens, "Delivered tokens that make a pair eligible for recall");
  cmd->add_flag("--strict", o->strict, "Exit 1 unless the mapping is exact");
  o->thresholds.add(cmd);
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto responses = read_responses(pick(o->responses, cfg.responses_path));
      auto result = infer(read_hits(o->hits), responses, o->thresholds.resolve(cfg));
      auto e = evaluate_inference(read_ground_truth(o->truth), result, o->min_tokens);
      print_evaluation(ctx.out, e);
      return o->strict && !e.exact() ? 1 : 0;
    };
  });
}

void add_audit(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("audit", "Report token pairs that extraction cannot tell apart");
  auto store_dir = std::make_shared<std::string>();
  cmd->add_option("--store", *store_dir, "Token store directory");
  cmd->callback([&ctx, store_dir] {
    ctx.action = [&ctx, store_dir] {
      auto cfg = ctx.config();
      auto store = existing_store(cfg, pick(*store_dir, cfg.store_dir));
      auto report = audit_assignments(*store);
      auto ref = [](const TokenRef& r) {
        return json{{"site_id", r.site_id},
                    {"slot", slot_name(r.slot_id)},
                    {"user_agent", r.fingerprint.user_agent},
                    {"asn", r.fingerprint.asn},
                    {"value", r.value}};
      };
      auto pairs = [&](const char* kind, const std::vector<TokenPair>& ps) {
        for (const auto& p : ps)
          if (ctx.jsonl())
            ctx.out << json{{"kind", kind}, {"first", ref(p.first)}, {"second", ref(p.second)}}.dump() << "\n";
          else
            ctx.out << kind << "," << p.first.site_id << "," << slot_name(p.first.slot_id) << ",\"" << p.first.value
                    << "\"," << p.second.site_id << "," << slot_name(p.second.slot_id) << ",\"" << p.second.value
                    << "\"\n";
      };
      if (!ctx.jsonl()) ctx.out << "kind,first_site,first_slot,first_value,second_site,second_slot,second_value\n";
      pairs("duplicate", report.duplicate_value_pairs);
      pairs("cross_variable", report.cross_variable_pairs);
      pairs("subset", report.subset_pairs);
      ctx.err << store->size() << " assignments: " << report.duplicate_value_pairs.size() << " duplicate, "
              << report.cross_variable_pairs.size() << " cross-variable, " << report.subset_pairs.size()
              << " subset pairs, " << report.numeric_values.size() << " numeric values\n";
      return 0;
    };
  });
}

void add_export(CLI::App& app, Context& ctx) {
  auto* cmd = app.add_subcommand("export", "Dump the token assignments");
  struct Opts {
    std::string store, site;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--store", o->store, "Token store directory");
  cmd->add_option("--site", o->site, "Only this site");
  cmd->callback([&ctx, o] {
    ctx.action = [&ctx, o] {
      auto cfg = ctx.config();
      auto store = existing_store(cfg, pick(o->store, cfg.store_dir));
      bool csv = ctx.output == "csv";
      if (csv) {
        ctx.out << "site_id,user_agent,asn";
        for (int s = 1; s <= kSlotsPerSite; ++s) ctx.out << "," << slot_name(s);
        ctx.out << ",created_at\n";
      }
      auto q = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
          if (c == '"') out += '"';
          out += c;
        }
        return out + "\"";
      };
      for (const auto& a : store->assignments()) {
        if (!o->site.empty() && a.site_id != o->site) continue;
        if (!csv) {
          ctx.out << export_assignment_json(a) << "\n";
          continue;
        }
        ctx.out << a.site_id << "," << q(a.fingerprint.user_agent) << "," << a.fingerprint.asn;
        for (int s = 1; s <= kSlotsPerSite; ++s) {
          auto it = a.values.find(s);
          ctx.out << "," << q(it == a.values.end() ? std::string{} : it->second);
        }
        ctx.out << "," << to_rfc3339(a.created_at) << "\n";
      }
      return 0;
    };
  });
}

}  // namespace

void add_analysis_commands(CLI::App& app, Context& ctx) {
  add_extract(app, ctx);
  add_infer(app, ctx);
  add_report(app, ctx);
  add_simulate(app, ctx);
  add_evaluate(app, ctx);
  add_audit(app, ctx);
  add_export(app, ctx);
}

}  // namespace canary::cli
