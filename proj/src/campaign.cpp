#include "canary/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "canary/error.hpp"

namespace canary {

const std::vector<std::string> kDefaultRoundLabels{
    "baseline",          "1-week-offline", "2-weeks-offline", "1-week-back-online", "2-weeks-back-online",
    "1-week-block",      "2-week-block",   "1-week-post-block", "2-weeks-post-block"};

std::vector<std::string> CampaignPlan::round_labels() const {
  std::vector<std::string> declared;
  for (const auto& s : stages)
    for (const auto& g : s.groups)
      for (const auto& l : g.labels)
        if (std::find(declared.begin(), declared.end(), l) == declared.end()) declared.push_back(l);
  if (column_order.empty()) return declared;
  auto out = column_order;
  for (const auto& l : declared)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

Duration parse_duration(std::string_view text) {
  if (text.empty()) throw ConfigError("empty duration");
  Duration total{};
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
    if (j == i) throw ConfigError("bad duration '" + std::string(text) + "'");
    long long n = std::stoll(std::string(text.substr(i, j - i)));
    std::size_t k = j;
    while (k < text.size() && !(text[k] >= '0' && text[k] <= '9')) ++k;
    auto unit = text.substr(j, k - j);
    if (unit == "d")
      total += days(n);
    else if (unit == "h")
      total += hours(n);
    else if (unit == "m")
      total += std::chrono::minutes(n);
    else if (unit == "s")
      total += std::chrono::seconds(n);
    else if (unit == "ms")
      total += std::chrono::milliseconds(n);
    else
      throw ConfigError("bad duration unit in '" + std::string(text) + "' (d, h, m, s, ms)");
    i = k;
  }
  return total;
}

std::string format_duration(Duration d) {
  auto ms = d.count();
  if (ms == 0) return "0s";
  std::string out;
  auto take = [&](long long unit, const char* suffix) {
    if (ms >= unit) {
      out += std::to_string(ms / unit) + suffix;
      ms %= unit;
    }
  };
  take(86'400'000, "d");
  take(3'600'000, "h");
  take(60'000, "m");
  take(1'000, "s");
  take(1, "ms");
  return out;
}

void validate_plan(const CampaignPlan& plan, const std::vector<std::string>& site_ids) {
  std::set<std::string> known(site_ids.begin(), site_ids.end());
  std::set<std::string> labels;
  Duration prev_start = Duration::min();
  std::set<std::string> stage_ids;
  for (const auto& stage : plan.stages) {
    if (stage.stage_id.empty()) throw ConfigError("stage without an id");
    if (!stage_ids.insert(stage.stage_id).second) throw ConfigError("stage '" + stage.stage_id + "' repeats");
    if (stage.start < prev_start) throw ConfigError("stage '" + stage.stage_id + "' starts before its predecessor");
    prev_start = stage.start;
    std::map<std::string, int> membership;
    for (const auto& g : stage.groups) {
      if (g.offsets.size() != g.labels.size())
        throw ConfigError("stage '" + stage.stage_id + "': each offset needs exactly one label");
      for (std::size_t i = 1; i < g.offsets.size(); ++i)
        if (g.offsets[i] <= g.offsets[i - 1])
          throw ConfigError("stage '" + stage.stage_id + "': offsets must be strictly increasing");
      for (const auto& l : g.labels)
        if (!labels.insert(l).second) throw ConfigError("round label '" + l + "' used twice");
      for (const auto& s : g.sites) {
        if (!known.contains(s)) throw ConfigError("stage '" + stage.stage_id + "' names unknown site '" + s + "'");
        ++membership[s];
      }
    }
    for (const auto& s : site_ids) {
      auto n = membership[s];
      if (n != 1)
        throw ConfigError("stage '" + stage.stage_id + "': site '" + s + "' is in " + std::to_string(n) +
                          " groups (expected 1)");
    }
  }
}

namespace {

Timestamp plan_start(const toml::node_view<const toml::node>& node) {
  if (auto s = node.value<std::string>()) return parse_rfc3339(*s);
  if (auto dt = node.value<toml::date_time>()) {
    std::ostringstream ss;
    ss << *dt;
    return parse_rfc3339(ss.str());
  }
  if (auto d = node.value<toml::date>()) {
    std::ostringstream ss;
    ss << *d;
    return parse_rfc3339(ss.str());
  }
  throw ConfigError("plan needs a start timestamp");
}

std::vector<std::string> strings(const toml::node_view<const toml::node>& node, const std::string& what) {
  std::vector<std::string> out;
  auto arr = node.as_array();
  if (!arr) throw ConfigError(what + " must be an array of strings");
  for (const auto& v : *arr) {
    auto s = v.value<std::string>();
    if (!s) throw ConfigError(what + " must be an array of strings");
    out.push_back(*s);
  }
  return out;
}

}  // namespace

CampaignPlan parse_campaign_plan(std::string_view toml_text, const std::vector<std::string>& site_ids,
                                 const std::string& origin) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  const auto& ctbl = tbl;
  CampaignPlan plan;
  plan.start = plan_start(ctbl["start"]);
  if (ctbl["column_order"]) plan.column_order = strings(ctbl["column_order"], "column_order");
  auto stages = ctbl["stages"].as_array();
  if (!stages) throw ConfigError(origin + ": no [[stages]]");
  for (const auto& sn : *stages) {
    auto st = sn.as_table();
    if (!st) throw ConfigError(origin + ": stages entries must be tables");
    toml::node_view<const toml::node> sv{*st};
    CampaignStage stage;
    stage.stage_id = sv["id"].value_or(std::string{});
    stage.start = parse_duration(sv["start"].value_or(std::string{"0d"}));
    auto groups = sv["groups"].as_array();
    if (!groups) throw ConfigError(origin + ": stage '" + stage.stage_id + "' has no [[stages.groups]]");
    std::vector<bool> wildcard;
    for (const auto& gn : *groups) {
      auto gt = gn.as_table();
      if (!gt) throw ConfigError(origin + ": group entries must be tables");
      toml::node_view<const toml::node> gv{*gt};
      StageGroup g;
      g.sites = strings(gv["sites"], "sites");
      g.condition = parse_site_condition(gv["condition"].value_or(std::string{"online"}));
      for (const auto& o : strings(gv["offsets"], "offsets")) g.offsets.push_back(parse_duration(o));
      g.labels = strings(gv["labels"], "labels");
      wildcard.push_back(g.sites.size() == 1 && g.sites[0] == "*");
      stage.groups.push_back(std::move(g));
    }
    std::set<std::string> named;
    for (std::size_t i = 0; i < stage.groups.size(); ++i)
      if (!wildcard[i]) named.insert(stage.groups[i].sites.begin(), stage.groups[i].sites.end());
    for (std::size_t i = 0; i < stage.groups.size(); ++i)
      if (wildcard[i]) {
        stage.groups[i].sites.clear();
        for (const auto& s : site_ids)
          if (!named.contains(s)) stage.groups[i].sites.push_back(s);
      }
    plan.stages.push_back(std::move(stage));
  }
  validate_plan(plan, site_ids);
  return plan;
}

CampaignPlan load_campaign_plan(const std::filesystem::path& path, const std::vector<std::string>& site_ids) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read campaign plan " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_campaign_plan(ss.str(), site_ids, path.string());
}

CampaignPlan default_campaign_plan(const std::vector<std::string>& site_ids, Timestamp start) {
  auto half = site_ids.begin() + static_cast<std::ptrdiff_t>(site_ids.size() / 2);
  std::vector<std::string> a(site_ids.begin(), half), b(half, site_ids.end());
  CampaignPlan plan;
  plan.start = start;
  plan.column_order = kDefaultRoundLabels;
  plan.stages.push_back({"stage-1", days(0), {{site_ids, SiteCondition::Online, {days(60)}, {"baseline"}}}});
  plan.stages.push_back({"stage-2",
                         days(61),
                         {{a, SiteCondition::Offline, {days(7), days(14)}, {"1-week-offline", "2-weeks-offline"}},
                          {b, SiteCondition::RobotsBlocked, {days(7), days(14)}, {"1-week-block", "2-week-block"}}}});
  plan.stages.push_back(
      {"stage-3",
       days(76),
       {{a, SiteCondition::Online, {days(7), days(14)}, {"1-week-back-online", "2-weeks-back-online"}},
        {b, SiteCondition::Online, {days(7), days(14)}, {"1-week-post-block", "2-weeks-post-block"}}}});
  validate_plan(plan, site_ids);
  return plan;
}

std::vector<DueRound> due_rounds(const CampaignPlan& plan, Timestamp now, const std::set<std::string>& history) {
  std::vector<std::pair<std::size_t, DueRound>> due;
  std::size_t order = 0;
  for (const auto& stage : plan.stages)
    for (const auto& g : stage.groups)
      for (std::size_t i = 0; i < g.offsets.size(); ++i, ++order) {
        auto at = plan.start + stage.start + g.offsets[i];
        if (at > now || history.contains(g.labels[i])) continue;
        due.push_back({order, {stage.stage_id, g.sites, g.condition, g.labels[i], at}});
      }
  std::stable_sort(due.begin(), due.end(), [](const auto& x, const auto& y) {
    return x.second.due_at != y.second.due_at ? x.second.due_at < y.second.due_at : x.first < y.first;
  });
  std::vector<DueRound> out;
  for (auto& [_, r] : due) out.push_back(std::move(r));
  return out;
}

SiteCondition planned_condition(const CampaignPlan& plan, const std::string& site_id, Timestamp now) {
  SiteCondition c = SiteCondition::Online;
  for (const auto& stage : plan.stages) {
    if (plan.start + stage.start > now) break;
    for (const auto& g : stage.groups)
      if (std::find(g.sites.begin(), g.sites.end(), site_id) != g.sites.end()) c = g.condition;
  }
  return c;
}

std::optional<SiteCondition> round_condition(const CampaignPlan& plan, const std::string& site_id,
                                             const std::string& round_label) {
  for (const auto& stage : plan.stages)
    for (const auto& g : stage.groups)
      if (std::find(g.labels.begin(), g.labels.end(), round_label) != g.labels.end() &&
          std::find(g.sites.begin(), g.sites.end(), site_id) != g.sites.end())
        return g.condition;
  return std::nullopt;
}

}  // namespace canary
