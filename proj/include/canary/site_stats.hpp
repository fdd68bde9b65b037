#pragma once

#include <map>
#include <string>
#include <vector>

#include "canary/visit_log.hpp"

namespace canary {

struct DistinctCounts {
  double user_agents = 0;
  double asns = 0;
  double visitors = 0;  // distinct (User-Agent, ASN) pairs

  bool operator==(const DistinctCounts&) const = default;
};

/// Visitor statistics in the four-row shape: column-wise minimum, maximum
/// and mean over sites, then the distinct counts over the union of sites.
struct SiteStats {
  std::map<std::string, DistinctCounts> per_site;
  DistinctCounts min;
  DistinctCounts max;
  DistinctCounts avg;
  DistinctCounts all;

  static constexpr const char* kRowLabels[4] = {"Min across sites", "Max from sites", "Avg from sites",
                                                "All across sites"};
  static constexpr const char* kColumnLabels[3] = {"User-Agents", "ASNs", "Unique visitors"};
};

/// Misc-log records (empty site_id) are ignored.
SiteStats site_stats(const std::vector<VisitRecord>& log);

std::string site_stats_csv(const SiteStats& s);
std::string site_stats_text(const SiteStats& s);
std::string site_stats_json(const SiteStats& s);

}  // namespace canary
