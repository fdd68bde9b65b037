#include "canary/site_stats.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

namespace canary {

namespace {

struct Sets {
  std::set<std::string> uas;
  std::set<std::uint32_t> asns;
  std::set<ScraperFingerprint> visitors;

  void add(const VisitRecord& v) {
    uas.insert(v.user_agent);
    asns.insert(v.asn);
    visitors.insert(v.fingerprint());
  }
  DistinctCounts counts() const {
    return {static_cast<double>(uas.size()), static_cast<double>(asns.size()), static_cast<double>(visitors.size())};
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  if (v == static_cast<double>(static_cast<long long>(v)))
    ss << static_cast<long long>(v);
  else
    ss << std::fixed << std::setprecision(2) << v;
  return ss.str();
}

std::vector<std::pair<std::string, DistinctCounts>> rows(const SiteStats& s) {
  return {{SiteStats::kRowLabels[0], s.min},
          {SiteStats::kRowLabels[1], s.max},
          {SiteStats::kRowLabels[2], s.avg},
          {SiteStats::kRowLabels[3], s.all}};
}

}  // namespace

SiteStats site_stats(const std::vector<VisitRecord>& log) {
  std::map<std::string, Sets> by_site;
  Sets all;
  for (const auto& v : log) {
    if (v.site_id.empty()) continue;
    by_site[v.site_id].add(v);
    all.add(v);
  }
  SiteStats s;
  if (by_site.empty()) return s;
  bool first = true;
  for (const auto& [site, sets] : by_site) {
    auto c = sets.counts();
    s.per_site[site] = c;
    if (first) {
      s.min = s.max = c;
      first = false;
    } else {
      s.min = {std::min(s.min.user_agents, c.user_agents), std::min(s.min.asns, c.asns),
               std::min(s.min.visitors, c.visitors)};
      s.max = {std::max(s.max.user_agents, c.user_agents), std::max(s.max.asns, c.asns),
               std::max(s.max.visitors, c.visitors)};
    }
    s.avg.user_agents += c.user_agents;
    s.avg.asns += c.asns;
    s.avg.visitors += c.visitors;
  }
  auto n = static_cast<double>(by_site.size());
  s.avg = {s.avg.user_agents / n, s.avg.asns / n, s.avg.visitors / n};
  s.all = all.counts();
  return s;
}

std::string site_stats_csv(const SiteStats& s) {
  std::ostringstream out;
  out << "," << SiteStats::kColumnLabels[0] << "," << SiteStats::kColumnLabels[1] << ","
      << SiteStats::kColumnLabels[2] << "\n";
  for (const auto& [label, c] : rows(s))
    out << label << "," << fmt(c.user_agents) << "," << fmt(c.asns) << "," << fmt(c.visitors) << "\n";
  return out.str();
}

std::string site_stats_text(const SiteStats& s) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "" << std::right;
  for (const auto* col : SiteStats::kColumnLabels) out << std::setw(17) << col;
  out << "\n";
  for (const auto& [label, c] : rows(s)) {
    out << std::left << std::setw(18) << label << std::right << std::setw(17) << fmt(c.user_agents)
        << std::setw(17) << fmt(c.asns) << std::setw(17) << fmt(c.visitors) << "\n";
  }
  return out.str();
}

std::string site_stats_json(const SiteStats& s) {
  auto obj = [](const DistinctCounts& c) {
    return nlohmann::json{{"user_agents", c.user_agents}, {"asns", c.asns}, {"visitors", c.visitors}};
  };
  nlohmann::json j{{"min", obj(s.min)}, {"max", obj(s.max)}, {"avg", obj(s.avg)}, {"all", obj(s.all)}};
  j["per_site"] = nlohmann::json::object();
  for (const auto& [site, c] : s.per_site) j["per_site"][site] = obj(c);
  return j.dump();
}

}  // namespace canary
