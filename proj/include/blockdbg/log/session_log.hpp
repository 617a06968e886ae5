#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace blockdbg {

enum class EventKind {
  kSessionStart,
  kProgramLoad,
  kProgramEdit,
  kRunStart,
  kBreakpointSet,
  kBreakpointClear,
  kBreakpointHit,
  kContinue,
  kStepIn,
  kStepOver,
  kStepOut,
  kWatchAdd,
  kWatchRemove,
  kWatchEval,
  kVariableInspect,
  kPause,
  kResume,
  kOutput,
  kRunEnd,
  kSessionEnd,
};

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> event_kind_from_name(std::string_view name);

enum class Group { kA, kB, kUnspecified };

std::string_view group_name(Group group);
std::optional<Group> group_from_name(std::string_view name);

struct LogEvent {
  std::int64_t timestamp = 0;  // milliseconds since session start
  std::string session_id;
  std::string subject_id;
  Group group = Group::kUnspecified;
  EventKind kind = EventKind::kSessionStart;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

nlohmann::json event_to_json(const LogEvent& event);
// Throws Error{kMalformedLine} on schema violations.
LogEvent event_from_json(const nlohmann::json& doc);

// Single JSONL line without the trailing newline.
std::string encode_event(const LogEvent& event);

// Append-only destination for log events. Rejects timestamps that go
// backwards with Error{kOutOfOrderTimestamp}; the event is not stored.
class LogSink {
 public:
  virtual ~LogSink() = default;

  void append(const LogEvent& event);

  std::optional<std::int64_t> last_timestamp() const { return last_; }

 protected:
  virtual void write(const LogEvent& event) = 0;

 private:
  std::optional<std::int64_t> last_;
};

// Keeps events in memory (tests, replay).
class MemoryLogSink : public LogSink {
 public:
  const std::vector<LogEvent>& events() const { return events_; }

 protected:
  void write(const LogEvent& event) override { events_.push_back(event); }

 private:
  std::vector<LogEvent> events_;
};

// Writes one JSON line per event and flushes after each, so a crash loses
// at most the event being written.
class JsonlLogWriter : public LogSink {
 public:
  // Appends to `path`, creating it when absent. Throws Error{kStorage}.
  explicit JsonlLogWriter(const std::string& path);

  const std::string& path() const { return path_; }

 protected:
  void write(const LogEvent& event) override;

 private:
  std::string path_;
  std::ofstream out_;
};

// Forwards to several sinks; ordering is enforced by this sink.
class TeeLogSink : public LogSink {
 public:
  void add(LogSink* sink) { sinks_.push_back(sink); }

 protected:
  void write(const LogEvent& event) override;

 private:
  std::vector<LogSink*> sinks_;
};

struct SessionLog {
  std::vector<LogEvent> events;
  std::string source_path;
};

struct LogDiagnostic {
  std::size_t line = 0;  // 1-based; 0 for whole-file notes
  std::string message;
};

struct ReadResult {
  SessionLog log;
  std::vector<LogDiagnostic> diagnostics;
};

// Parses a `.dbglog.jsonl` file. In salvage mode every valid line is kept
// and each bad line yields a diagnostic; in strict mode the first bad line
// throws Error{kMalformedLine}. Blank lines are skipped.
ReadResult read_log(const std::string& path, bool strict = false);
ReadResult parse_log(std::string_view text, bool strict = false, std::string source_path = {});

void write_log(const std::string& path, const std::vector<LogEvent>& events);

}  // namespace blockdbg
