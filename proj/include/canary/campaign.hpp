#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "canary/site_template.hpp"
#include "canary/time.hpp"

namespace canary {

struct StageGroup {
  std::vector<std::string> sites;
  SiteCondition condition = SiteCondition::Online;
  std::vector<Duration> offsets;    // from stage start, strictly increasing
  std::vector<std::string> labels;  // one round label per offset
};

struct CampaignStage {
  std::string stage_id;
  Duration start{};  // from campaign start
  std::vector<StageGroup> groups;
};

struct CampaignPlan {
  Timestamp start{};
  std::vector<CampaignStage> stages;

  /// Round labels in report column order: `column_order` when set, else
  /// declaration order.
  std::vector<std::string> round_labels() const;
  std::vector<std::string> column_order;
};

struct DueRound {
  std::string stage_id;
  std::vector<std::string> sites;
  SiteCondition condition = SiteCondition::Online;
  std::string round_label;
  Timestamp due_at{};
};

/// Round labels of the three-stage timeline, in report column order.
extern const std::vector<std::string> kDefaultRoundLabels;

/// "60d", "12h", "30m", "45s", "250ms"; sums like "1d12h" are accepted.
Duration parse_duration(std::string_view text);
std::string format_duration(Duration d);

/// Throws ConfigError on unordered offsets, label/offset count mismatches,
/// repeated labels, unknown sites, or a site in zero or two groups of one
/// stage.
void validate_plan(const CampaignPlan& plan, const std::vector<std::string>& site_ids);

/// `sites = ["*"]` in a group stands for every site not named by another
/// group of the same stage.
CampaignPlan parse_campaign_plan(std::string_view toml_text, const std::vector<std::string>& site_ids,
                                 const std::string& origin = "plan");
CampaignPlan load_campaign_plan(const std::filesystem::path& path, const std::vector<std::string>& site_ids);

/// Stage 1: everything online, baseline at day 60. Stage 2 from day 61: the
/// first half of the sites offline, the second half robots-blocked, queried
/// after one and two weeks. Stage 3 from day 76: all online again, queried
/// after one and two weeks.
CampaignPlan default_campaign_plan(const std::vector<std::string>& site_ids, Timestamp start);

/// Rounds whose due time is <= now and whose label is not in `history`,
/// ordered by due time then declaration order.
std::vector<DueRound> due_rounds(const CampaignPlan& plan, Timestamp now, const std::set<std::string>& history);

/// Condition the plan prescribes for a site at `now` (Online before the
/// first stage starts).
SiteCondition planned_condition(const CampaignPlan& plan, const std::string& site_id, Timestamp now);

/// Condition under which a round is queried for a site, if the site takes
/// part in it.
std::optional<SiteCondition> round_condition(const CampaignPlan& plan, const std::string& site_id,
                                             const std::string& round_label);

}  // namespace canary
