#include "blockdbg/log/session_log.hpp"

#include <array>
#include <sstream>

#include "blockdbg/core/error.hpp"

namespace blockdbg {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 20> kKindNames = {
    "session_start",  "program_load", "program_edit", "run_start",    "breakpoint_set",
    "breakpoint_clear", "breakpoint_hit", "continue", "step_in",      "step_over",
    "step_out",       "watch_add",    "watch_remove", "watch_eval",   "variable_inspect",
    "pause",          "resume",       "output",       "run_end",      "session_end",
};

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::kMalformedLine, what); }

}  // namespace

std::string_view event_kind_name(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string_view group_name(Group group) {
  switch (group) {
    case Group::kA: return "A";
    case Group::kB: return "B";
    case Group::kUnspecified: return "unspecified";
  }
  return "unspecified";
}

std::optional<Group> group_from_name(std::string_view name) {
  if (name == "A") return Group::kA;
  if (name == "B") return Group::kB;
  if (name == "unspecified") return Group::kUnspecified;
  return std::nullopt;
}

json event_to_json(const LogEvent& e) {
  return json{{"timestamp", e.timestamp},
              {"session_id", e.session_id},
              {"subject_id", e.subject_id},
              {"group", std::string(group_name(e.group))},
              {"kind", std::string(event_kind_name(e.kind))},
              {"payload", e.payload}};
}

LogEvent event_from_json(const json& doc) {
  if (!doc.is_object()) malformed("event is not a JSON object");
  auto field = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) malformed(std::string("missing field '") + key + "'");
    return *it;
  };
  LogEvent e;
  const json& ts = field("timestamp");
  if (!ts.is_number_integer()) malformed("timestamp must be an integer");
  e.timestamp = ts.get<std::int64_t>();
  if (!field("session_id").is_string() || !field("subject_id").is_string() ||
      !field("group").is_string() || !field("kind").is_string()) {
    malformed("session_id, subject_id, group and kind must be strings");
  }
  e.session_id = doc["session_id"].get<std::string>();
  e.subject_id = doc["subject_id"].get<std::string>();
  auto group = group_from_name(doc["group"].get<std::string>());
  if (!group) malformed("unknown group '" + doc["group"].get<std::string>() + "'");
  e.group = *group;
  auto kind = event_kind_from_name(doc["kind"].get<std::string>());
  if (!kind) malformed("unknown event kind '" + doc["kind"].get<std::string>() + "'");
  e.kind = *kind;
  if (auto it = doc.find("payload"); it != doc.end()) {
    if (!it->is_object()) malformed("payload must be an object");
    e.payload = *it;
  }
  return e;
}

std::string encode_event(const LogEvent& event) { return event_to_json(event).dump(); }

void LogSink::append(const LogEvent& event) {
  if (last_ && event.timestamp < *last_) {
    throw Error(ErrorKind::kOutOfOrderTimestamp,
                "timestamp " + std::to_string(event.timestamp) + " precedes last appended " +
                    std::to_string(*last_));
  }
  write(event);
  last_ = event.timestamp;
}

JsonlLogWriter::JsonlLogWriter(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::app) {
  if (!out_) throw Error(ErrorKind::kStorage, "cannot open log file '" + path + "'");
}

void JsonlLogWriter::write(const LogEvent& event) {
  out_ << encode_event(event) << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::kStorage, "write to '" + path_ + "' failed");
}

void TeeLogSink::write(const LogEvent& event) {
  for (LogSink* sink : sinks_) sink->append(event);
}

ReadResult parse_log(std::string_view text, bool strict, std::string source_path) {
  ReadResult result;
  result.log.source_path = std::move(source_path);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      json doc;
      try {
        doc = json::parse(line.begin(), line.end());
      } catch (const json::parse_error& e) {
        malformed(e.what());
      }
      result.log.events.push_back(event_from_json(doc));
    } catch (const Error& e) {
      if (strict) {
        throw Error(ErrorKind::kMalformedLine,
                    "line " + std::to_string(line_no) + ": " + e.what());
      }
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (result.log.events.empty() && result.diagnostics.empty()) {
    result.diagnostics.push_back({0, "log is empty"});
  }
  return result;
}

ReadResult read_log(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kStorage, "cannot open log file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_log(buf.str(), strict, path);
}

void write_log(const std::string& path, const std::vector<LogEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kStorage, "cannot write log file '" + path + "'");
  for (const auto& e : events) out << encode_event(e) << '\n';
}

}  // namespace blockdbg
