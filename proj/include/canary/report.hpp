#pragma once

#include <string>
#include <vector>

#include "canary/inference.hpp"

namespace canary {

struct ReportRow {
  std::string chatbot_id;
  std::string ua_family;
  AgentCategory category = AgentCategory::GenericBrowser;
  bool online = false;
  bool offline = false;
  bool blocked = false;
  bool publicly_known = false;
  std::vector<ScraperFingerprint> fingerprints;
};

enum class Presence { Absent, Present, PresentOnlyHere };

/// UA presence per round. In a matrix built with a paired matrix,
/// PresentOnlyHere marks a presence absent from the paired column.
struct RoundMatrix {
  std::string title;
  std::vector<std::string> columns;
  struct Row {
    std::string chatbot_id;
    std::string ua_family;
    std::vector<Presence> cells;
  };
  std::vector<Row> rows;
};

struct ReportLayout {
  std::vector<std::string> offline_columns{"baseline", "1-week-offline", "2-weeks-offline", "1-week-back-online",
                                           "2-weeks-back-online"};
  std::vector<std::string> blocking_columns{"baseline", "1-week-block", "2-week-block", "1-week-post-block",
                                            "2-weeks-post-block"};
};

struct AttributionReport {
  std::vector<ReportRow> main;
  RoundMatrix offline;
  RoundMatrix blocking;
};

/// Rows are (chatbot, UA family) pairs with a yes verdict. A row is present
/// in a condition or round when one of its attributed fingerprints has an
/// accepted hit from an interaction under that condition or round.
AttributionReport build_report(const InferenceResult& inference, const std::vector<ResponseRecord>& responses,
                               const AgentLists& lists, const ReportLayout& layout = {});

std::string report_main_csv(const AttributionReport& r);
std::string report_matrix_csv(const RoundMatrix& m);
std::string report_text(const AttributionReport& r);

}  // namespace canary
