#include "canary/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace canary {

namespace {

using RowKey = std::pair<std::string, std::string>;  // chatbot, family

std::string yn(bool b) { return b ? "Y" : ""; }

std::string cell_text(Presence p) {
  switch (p) {
    case Presence::Absent: return "";
    case Presence::Present: return "Y";
    case Presence::PresentOnlyHere: return "Y*";
  }
  return "";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

RoundMatrix matrix(const std::string& title, const std::vector<std::string>& columns,
                   const std::vector<RowKey>& rows, const std::map<RowKey, std::set<std::string>>& rounds) {
  RoundMatrix m{title, columns, {}};
  for (const auto& key : rows) {
    RoundMatrix::Row row{key.first, key.second, {}};
    const auto& seen = rounds.count(key) ? rounds.at(key) : std::set<std::string>{};
    for (const auto& c : columns) row.cells.push_back(seen.contains(c) ? Presence::Present : Presence::Absent);
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace

AttributionReport build_report(const InferenceResult& inference, const std::vector<ResponseRecord>& responses,
                               const AgentLists& lists, const ReportLayout& layout) {
  auto meta = interaction_metadata(responses);
  std::map<RowKey, ReportRow> rows;
  for (std::size_t i = 0; i < inference.verdicts.size(); ++i) {
    const auto& v = inference.verdicts[i];
    if (!v.decision) continue;
    auto family = parse_user_agent(v.fingerprint.user_agent).family;
    auto& row = rows[{v.chatbot_id, family}];
    row.chatbot_id = v.chatbot_id;
    row.ua_family = family;
    row.category = classify_agent(v.chatbot_id, family, lists);
    if (auto it = lists.publicly_known.find(v.chatbot_id); it != lists.publicly_known.end())
      row.publicly_known = it->second.contains(family);
    row.fingerprints.push_back(v.fingerprint);
  }
  std::map<RowKey, std::set<std::string>> rounds;
  for (const auto& h : inference.attributed) {
    const auto& m = meta.at(h.interaction_id);
    RowKey key{m.chatbot_id, parse_user_agent(h.fingerprint.user_agent).family};
    auto it = rows.find(key);
    if (it == rows.end()) continue;
    rounds[key].insert(m.round_label);
    switch (m.condition) {
      case SiteCondition::Online: it->second.online = true; break;
      case SiteCondition::Offline: it->second.offline = true; break;
      case SiteCondition::RobotsBlocked: it->second.blocked = true; break;
    }
  }
  AttributionReport report;
  std::vector<RowKey> keys;
  for (auto& [key, row] : rows) {
    keys.push_back(key);
    report.main.push_back(std::move(row));
  }
  report.offline = matrix("Condition 2 (offline) rounds", layout.offline_columns, keys, rounds);
  report.blocking = matrix("Condition 3 (robots.txt block) rounds", layout.blocking_columns, keys, rounds);
  // Blocking-side presences missing from the paired offline column.
  for (std::size_t r = 0; r < report.blocking.rows.size(); ++r)
    for (std::size_t c = 0; c < report.blocking.columns.size(); ++c) {
      auto& cell = report.blocking.rows[r].cells[c];
      if (c < report.offline.columns.size() && report.offline.columns[c] == report.blocking.columns[c]) continue;
      bool paired = c < report.offline.columns.size() && report.offline.rows[r].cells[c] != Presence::Absent;
      if (cell == Presence::Present && !paired) cell = Presence::PresentOnlyHere;
    }
  return report;
}

std::string report_main_csv(const AttributionReport& r) {
  std::ostringstream out;
  out << "chatbot,user_agent,category,online,offline,blocked,publicly_known\n";
  for (const auto& row : r.main)
    out << csv_field(row.chatbot_id) << "," << csv_field(row.ua_family) << "," << to_string(row.category) << ","
        << yn(row.online) << "," << yn(row.offline) << "," << yn(row.blocked) << "," << yn(row.publicly_known)
        << "\n";
  return out.str();
}

std::string report_matrix_csv(const RoundMatrix& m) {
  std::ostringstream out;
  out << "chatbot,user_agent";
  for (const auto& c : m.columns) out << "," << c;
  out << "\n";
  for (const auto& row : m.rows) {
    out << csv_field(row.chatbot_id) << "," << csv_field(row.ua_family);
    for (auto p : row.cells) out << "," << cell_text(p);
    out << "\n";
  }
  return out.str();
}

namespace {

std::string aligned(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
      if (i + 1 < cells.size()) out << "  ";
    }
    out << "\n";
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return out.str();
}

std::string matrix_text(const RoundMatrix& m) {
  std::vector<std::string> header{"Chatbot", "User-Agent"};
  header.insert(header.end(), m.columns.begin(), m.columns.end());
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : m.rows) {
    std::vector<std::string> cells{r.chatbot_id, r.ua_family};
    for (auto p : r.cells) cells.push_back(cell_text(p).empty() ? "-" : cell_text(p));
    rows.push_back(std::move(cells));
  }
  return m.title + "\n" + aligned(header, rows);
}

}  // namespace

std::string report_text(const AttributionReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.main)
    rows.push_back({row.chatbot_id, row.ua_family, std::string(to_string(row.category)), row.online ? "Y" : "-",
                    row.offline ? "Y" : "-", row.blocked ? "Y" : "-", row.publicly_known ? "Y" : "-"});
  std::string out = aligned({"Chatbot", "User-Agent", "Category", "Online", "Offline", "Blocked", "Publicly known"}, rows);
  out += "\n" + matrix_text(r.offline);
  out += "\n" + matrix_text(r.blocking);
  out += "Y* = seen in this round but not in the matching offline round\n";
  return out;
}

}  // namespace canary
