#include "blockdbg/analytics/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "blockdbg/core/error.hpp"

namespace blockdbg::analytics {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kStorage, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name, bool required) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  if (required) {
    throw Error(ErrorKind::kSyntax, "CSV header lacks column '" + std::string(name) + "'");
  }
  return header.size();
}

json table_json(const ContingencyTable2x2& t) { return json::array({{t.a, t.b}, {t.c, t.d}}); }

json test_json(const TestResult& r) {
  json out = {{"method", std::string(method_name(r.method))},
              {"p_value", r.p_value},
              {"p_value_text", format_p(r.p_value)},
              {"alpha", r.alpha},
              {"significant", r.significant}};
  if (r.statistic) {
    out["statistic"] = *r.statistic;
    out["statistic_text"] = format_p(*r.statistic);
  }
  return out;
}

json counts_json(const std::array<int, 6>& counts) {
  json out = json::object();
  for (DebuggerFunction f : kAllFunctions) {
    out[std::string(function_name(f))] = counts[static_cast<std::size_t>(f)];
  }
  return out;
}

void reference_notes(FunctionAnalysis& fa, const std::vector<ReferenceResult>& refs) {
  for (const auto& ref : refs) {
    if (ref.function != fa.function) continue;
    std::string label = ref.label.empty() ? std::string("reference") : ref.label;
    if (!(ref.table == fa.table)) {
      fa.notes.push_back(label + ": observed counts differ from the reference table; p-value " +
                         format_p(ref.p_value) + " not compared");
      continue;
    }
    bool chi_ok = fa.chi_squared &&
                  std::fabs(fa.chi_squared->p_value - ref.p_value) <= kReferenceTolerance;
    bool fisher_ok = fa.fisher && std::fabs(fa.fisher->p_value - ref.p_value) <= kReferenceTolerance;
    if (chi_ok || fisher_ok) {
      fa.notes.push_back(label + ": reference p-value " + format_p(ref.p_value) +
                         " reproduced by " +
                         (chi_ok ? "chi-squared (Yates)" : "Fisher exact"));
    } else {
      std::string chi = fa.chi_squared ? format_p(fa.chi_squared->p_value) : "undefined";
      std::string fisher = fa.fisher ? format_p(fa.fisher->p_value) : "undefined";
      fa.notes.push_back(label + ": reference p-value " + format_p(ref.p_value) +
                         " is NOT reproduced by either test on these counts "
                         "(chi-squared (Yates) " + chi + ", Fisher exact " + fisher + ")");
    }
  }
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_p(double p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", p);
  return buf;
}

std::vector<RosterEntry> parse_roster(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorKind::kSyntax, "roster is empty");
  std::size_t subject = column(rows[0], "subject_id", true);
  std::size_t group = column(rows[0], "group", true);
  std::vector<RosterEntry> out;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() <= std::max(subject, group)) {
      throw Error(ErrorKind::kSyntax, "roster line " + std::to_string(i + 1) + ": too few columns");
    }
    auto g = group_from_name(row[group]);
    if (!g || *g == Group::kUnspecified) {
      throw Error(ErrorKind::kSyntax, "roster line " + std::to_string(i + 1) + ": group must be A or B");
    }
    if (!seen.insert(row[subject]).second) {
      throw Error(ErrorKind::kRosterMismatch, "subject '" + row[subject] + "' listed twice in roster");
    }
    out.push_back({row[subject], *g});
  }
  return out;
}

std::vector<RosterEntry> read_roster(const std::string& path) { return parse_roster(read_file(path)); }

std::vector<UsageTally> parse_tally_csv(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorKind::kSyntax, "tally file is empty");
  const auto& header = rows[0];
  std::size_t subject = column(header, "subject_id", true);
  std::size_t group = column(header, "group", false);
  std::array<std::size_t, 6> cols{};
  for (DebuggerFunction f : kAllFunctions) {
    cols[static_cast<std::size_t>(f)] = column(header, function_name(f), true);
  }
  std::vector<UsageTally> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() < header.size()) {
      throw Error(ErrorKind::kSyntax, "tally line " + std::to_string(i + 1) + ": too few columns");
    }
    UsageTally t;
    t.subject_id = row[subject];
    if (group < header.size()) t.group = group_from_name(row[group]).value_or(Group::kUnspecified);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      try {
        t.counts[k] = std::stoi(row[cols[k]]);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kSyntax, "tally line " + std::to_string(i + 1) + ": bad count");
      }
      if (t.counts[k] < 0) {
        throw Error(ErrorKind::kSyntax, "tally line " + std::to_string(i + 1) + ": negative count");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<UsageTally> read_tally_csv(const std::string& path) {
  return parse_tally_csv(read_file(path));
}

std::vector<ReferenceResult> parse_references(const json& doc) {
  std::vector<ReferenceResult> out;
  if (!doc.contains("references")) return out;
  for (const auto& r : doc.at("references")) {
    ReferenceResult ref;
    auto f = function_from_name(r.at("function").get<std::string>());
    if (!f) throw Error(ErrorKind::kSyntax, "reference: unknown function");
    ref.function = *f;
    ref.label = r.value("label", "");
    const auto& t = r.at("table");
    ref.table = {t.at(0).at(0).get<int>(), t.at(0).at(1).get<int>(), t.at(1).at(0).get<int>(),
                 t.at(1).at(1).get<int>()};
    ref.p_value = r.at("p_value").get<double>();
    out.push_back(std::move(ref));
  }
  return out;
}

std::vector<ReferenceResult> read_references(const std::string& path) {
  try {
    return parse_references(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSyntax, "reference file '" + path + "': " + e.what());
  }
}

AnalysisReport analyze(const AnalysisInput& input) {
  AnalysisReport report;
  report.alpha = input.alpha;

  std::map<std::string, UsageTally> tallies;
  for (const auto& entry : input.roster) {
    UsageTally t;
    t.subject_id = entry.subject_id;
    t.group = entry.group;
    tallies.emplace(entry.subject_id, t);
  }
  std::set<std::string> with_logs;
  for (const auto& log : input.logs) {
    UsageTally t = tally_usage(log);
    auto it = tallies.find(t.subject_id);
    if (it == tallies.end()) {
      throw Error(ErrorKind::kRosterMismatch,
                  "log " + log.source_path + " names subject '" + t.subject_id +
                      "' who is not in the roster");
    }
    if (t.group != Group::kUnspecified && t.group != it->second.group) {
      throw Error(ErrorKind::kRosterMismatch, "subject '" + t.subject_id + "' is in group " +
                                                  std::string(group_name(it->second.group)) +
                                                  " in the roster but " +
                                                  std::string(group_name(t.group)) + " in a log");
    }
    accumulate(it->second, t);
    with_logs.insert(t.subject_id);
    report.assessments.push_back(assess_procedure(log, input.rules));
  }
  for (const auto& [subject, _] : tallies) {
    if (!with_logs.count(subject)) {
      report.notes.push_back("subject '" + subject + "' has no session logs; counted as all zeros");
    }
  }

  std::vector<BinaryUsage> group_a;
  std::vector<BinaryUsage> group_b;
  for (const auto& [subject, t] : tallies) {
    report.tallies.push_back(t);
    BinaryUsage u = binarize(t);
    report.binary.push_back(u);
    (t.group == Group::kA ? group_a : group_b).push_back(u);
  }
  if (group_a.empty() || group_b.empty()) {
    throw Error(ErrorKind::kEmptyGroup, std::string("group ") + (group_a.empty() ? "A" : "B") +
                                            " has no subjects");
  }

  for (DebuggerFunction f : kAllFunctions) {
    FunctionAnalysis fa;
    fa.function = f;
    fa.table = build_table(group_a, group_b, f);
    try {
      fa.chi_squared = chi_squared_yates(fa.table, input.alpha);
      fa.fisher = fisher_exact(fa.table, input.alpha);
    } catch (const Error& e) {
      fa.test_error = e.what();
    }
    reference_notes(fa, input.references);
    report.functions.push_back(std::move(fa));
  }

  std::sort(report.assessments.begin(), report.assessments.end(),
            [](const ProcedureAssessment& x, const ProcedureAssessment& y) {
              return std::tie(x.subject_id, x.session_id) < std::tie(y.subject_id, y.session_id);
            });

  if (input.rater_a && input.rater_b) {
    report.rater_diff = compare_raters(*input.rater_a, *input.rater_b);
  }
  return report;
}

json report_to_json(const AnalysisReport& report) {
  json out = json::object();
  out["alpha"] = report.alpha;
  out["counting_rules_version"] = kCountingRulesVersion;

  json subjects = json::array();
  for (std::size_t i = 0; i < report.tallies.size(); ++i) {
    const auto& t = report.tallies[i];
    json used = json::object();
    for (DebuggerFunction f : kAllFunctions) used[std::string(function_name(f))] = report.binary[i][f];
    subjects.push_back({{"subject_id", t.subject_id},
                        {"group", std::string(group_name(t.group))},
                        {"counts", counts_json(t.counts)},
                        {"used", used}});
  }
  out["subjects"] = std::move(subjects);

  json tables = json::array();
  for (const auto& fa : report.functions) {
    json row = {{"function", std::string(function_name(fa.function))},
                {"table", table_json(fa.table)},
                {"notes", fa.notes}};
    if (fa.chi_squared) row["chi_squared_yates"] = test_json(*fa.chi_squared);
    if (fa.fisher) row["fisher_exact"] = test_json(*fa.fisher);
    if (!fa.test_error.empty()) row["test_error"] = fa.test_error;
    tables.push_back(std::move(row));
  }
  out["tables"] = std::move(tables);

  json assessments = json::array();
  for (const auto& a : report.assessments) {
    assessments.push_back({{"subject_id", a.subject_id},
                           {"session_id", a.session_id},
                           {"step3_breakpoint_inserted", a.step3_breakpoint_inserted},
                           {"step4_intention", a.step4_intention},
                           {"step5_bug_fixed", a.step5_bug_fixed},
                           {"evidence", {{"step3", a.step3_evidence},
                                         {"step4", a.step4_evidence},
                                         {"step5", a.step5_evidence}}}});
  }
  out["procedure_assessments"] = std::move(assessments);

  if (report.rater_diff) {
    json cells = json::array();
    for (const auto& c : report.rater_diff->cells) {
      cells.push_back({{"subject_id", c.subject_id},
                       {"function", std::string(function_name(c.function))},
                       {"count_a", c.count_a},
                       {"count_b", c.count_b},
                       {"delta", c.delta}});
    }
    json flips = json::array();
    for (const auto& [subject, f] : report.rater_diff->flips) {
      flips.push_back({{"subject_id", subject}, {"function", std::string(function_name(f))}});
    }
    out["rater_diff"] = {{"cells", cells}, {"flips", flips}};
  }
  out["notes"] = report.notes;
  return out;
}

std::string report_to_text(const AnalysisReport& report) {
  std::ostringstream out;
  out << "Usage tallies (counting rules v" << kCountingRulesVersion << ")\n";
  out << pad("subject", 14) << pad("group", 7);
  for (DebuggerFunction f : kAllFunctions) out << pad(std::string(function_name(f)), 18);
  out << "\n";
  for (const auto& t : report.tallies) {
    out << pad(t.subject_id, 14) << pad(std::string(group_name(t.group)), 7);
    for (DebuggerFunction f : kAllFunctions) out << pad(std::to_string(t[f]), 18);
    out << "\n";
  }

  for (const auto& fa : report.functions) {
    out << "\n" << function_title(fa.function) << "\n";
    out << pad("#", 4) << pad("Usage", 31) << pad("With tool learning", 21)
        << "Without tool learning\n";
    out << pad("1", 4) << pad("Used", 31) << pad(std::to_string(fa.table.a), 21) << fa.table.b << "\n";
    out << pad("2", 4) << pad("Not Used", 31) << pad(std::to_string(fa.table.c), 21) << fa.table.d
        << "\n";
    if (fa.chi_squared && fa.fisher) {
      out << pad("3", 4) << pad("p-value (chi-squared, Yates)", 31)
          << format_p(fa.chi_squared->p_value) << (fa.chi_squared->significant ? " *" : "") << "\n";
      out << pad("4", 4) << pad("p-value (Fisher exact)", 31) << format_p(fa.fisher->p_value)
          << (fa.fisher->significant ? " *" : "") << "\n";
    } else {
      out << pad("3", 4) << pad("p-value", 31) << "undefined (" << fa.test_error << ")\n";
    }
    for (const auto& note : fa.notes) out << "note: " << note << "\n";
  }
  out << "\n* significant at alpha = " << report.alpha << "\n";

  out << "\nProcedure assessment (steps 3-5)\n";
  out << pad("subject", 14) << pad("session", 20) << pad("step3", 7) << pad("step4", 7) << "step5\n";
  auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
  for (const auto& a : report.assessments) {
    out << pad(a.subject_id, 14) << pad(a.session_id, 20) << pad(yn(a.step3_breakpoint_inserted), 7)
        << pad(yn(a.step4_intention), 7) << yn(a.step5_bug_fixed) << "\n";
  }

  if (report.rater_diff) {
    out << "\nRater comparison\n";
    bool any = false;
    for (const auto& c : report.rater_diff->cells) {
      if (c.delta == 0) continue;
      any = true;
      out << pad(c.subject_id, 14) << pad(std::string(function_name(c.function)), 18) << "A=" << c.count_a
          << " B=" << c.count_b << " delta=" << c.delta << "\n";
    }
    if (!any) out << "all counts agree\n";
    out << "classification flips: " << report.rater_diff->flips.size() << "\n";
    for (const auto& [subject, f] : report.rater_diff->flips) {
      out << "  " << subject << " " << function_name(f) << "\n";
    }
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return out.str();
}

}  // namespace blockdbg::analytics
