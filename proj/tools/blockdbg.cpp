// blockdbg: run, debug, serve, replay and analyze block programs.
//
// Exit codes: 0 ok, 1 error, 2 fuel exhausted (run), 3 replay divergence.

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blockdbg/analytics/report.hpp"
#include "blockdbg/core/error.hpp"
#include "blockdbg/core/program_io.hpp"
#include "blockdbg/core/validate.hpp"
#include "blockdbg/debug/session.hpp"
#include "blockdbg/log/replay.hpp"
#include "blockdbg/log/session_log.hpp"
#include "blockdbg/protocol/server.hpp"
#include "blockdbg/protocol/transport.hpp"
#include "blockdbg/vm/machine.hpp"

namespace fs = std::filesystem;
using namespace blockdbg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFuel = 2;
constexpr int kExitDivergence = 3;

struct Options {
  std::string program;
  std::vector<std::string> logs;
  std::string log;
  std::string roster;
  std::string script;
  std::string subject;
  std::string group;
  std::string out;
  std::string reference;
  std::string rater_a;
  std::string rater_b;
  std::string ui_dir;
  std::uint64_t fuel = kDefaultFuel;
  int port = -1;
  double alpha = analytics::kDefaultAlpha;
  bool stdio = false;
  bool strict = false;
  bool pause_on_entry = true;
  std::vector<std::string> breakpoints;
};

void print_diagnostics(const ValidationError& e) {
  for (const auto& d : e.diagnostics()) std::cerr << to_string(d) << "\n";
}

std::shared_ptr<const Program> load_or_throw(const std::string& path) {
  return std::make_shared<const Program>(load_program_file(path));
}

SessionConfig session_config(const Options& o) {
  SessionConfig config;
  config.subject_id = o.subject;
  if (!o.group.empty()) {
    auto g = group_from_name(o.group);
    if (!g) throw Error(ErrorKind::kValidation, "group must be A or B");
    config.group = *g;
  }
  config.pause_on_entry = o.pause_on_entry;
  config.fuel = o.fuel;
  config.breakpoints = o.breakpoints;
  return config;
}

int cmd_validate(const Options& o) {
  Program program = load_program_file(o.program);
  for (const auto& d : validate(program)) std::cerr << to_string(d) << "\n";
  std::cout << program_hash(program) << "\n";
  return kExitOk;
}

int cmd_run(const Options& o) {
  RunResult result = run_to_completion(load(load_or_throw(o.program)), o.fuel);
  for (const auto& ev : result.events) {
    if (ev.kind == VmEvent::Kind::kOutput) {
      std::cout << ev.text << "\n";
    } else {
      std::cerr << "warning: " << ev.block << ": " << ev.text << "\n";
    }
  }
  if (result.termination == Termination::kFuelExhausted) {
    std::cerr << "fuel exhausted after " << result.final_state.tick_count << " ticks\n";
    return kExitFuel;
  }
  return kExitOk;
}

// Feeds protocol requests from a file (or stdin) through a session and
// prints every outgoing envelope. Handy for scripted sessions and tests.
int cmd_debug(const Options& o) {
  std::unique_ptr<LogSink> sink;
  if (o.log.empty()) {
    sink = std::make_unique<MemoryLogSink>();
  } else {
    sink = std::make_unique<JsonlLogWriter>(o.log);
  }
  protocol::ServerOptions options;
  options.program = load_or_throw(o.program);
  options.config = session_config(o);
  protocol::ProtocolServer server(options, *sink);
  server.attach([](const std::string& line) { std::cout << line << "\n"; });

  std::ifstream file;
  std::istream* in = &std::cin;
  if (!o.script.empty() && o.script != "-") {
    file.open(o.script);
    if (!file) throw Error(ErrorKind::kStorage, "cannot read " + o.script);
    in = &file;
  }
  std::string line;
  while (!server.finished() && std::getline(*in, line)) server.handle_line(line);
  server.shutdown();
  return kExitOk;
}

int cmd_serve(const Options& o) {
  protocol::ServerOptions options;
  if (!o.program.empty()) options.program = load_or_throw(o.program);
  options.config = session_config(o);
  JsonlLogWriter sink(o.log);
  protocol::ProtocolServer server(options, sink);
  protocol::install_stop_signal_handlers();
  if (o.stdio) {
    protocol::serve_fds(server, STDIN_FILENO, STDOUT_FILENO);
    return kExitOk;
  }
  int port = o.port;
  if (port < 0) {
    const char* env = std::getenv("BLOCKDBG_PORT");
    if (env == nullptr) throw Error(ErrorKind::kValidation, "serve needs --stdio, --port or BLOCKDBG_PORT");
    port = std::atoi(env);
  }
  protocol::TcpListener listener(static_cast<std::uint16_t>(port));
  std::cerr << "listening on 127.0.0.1:" << listener.port() << "\n";
  protocol::TcpServeOptions serve_options;
  if (!o.ui_dir.empty()) serve_options.ui_dir = o.ui_dir;
  protocol::serve_tcp(server, listener, serve_options);
  return kExitOk;
}

void report_log_diagnostics(const ReadResult& r) {
  for (const auto& d : r.diagnostics) {
    std::cerr << r.log.source_path << ":" << d.line << ": " << d.message << "\n";
  }
}

int cmd_replay(const Options& o) {
  ReadResult r = read_log(o.log, o.strict);
  report_log_diagnostics(r);
  Program program = load_program_file(o.program);
  ReplayReport report = replay(r.log, program);
  std::cout << report.describe() << "\n";
  return report.reproduced ? kExitOk : kExitDivergence;
}

// Directories expand to their *.jsonl files in name order.
std::vector<std::string> expand_logs(const std::vector<std::string>& inputs) {
  std::vector<std::string> paths;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      paths.push_back(in);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(in)) {
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
        found.push_back(entry.path().string());
      }
    }
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  return paths;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kStorage, "cannot write " + path.string());
  out << text;
}

int cmd_analyze(const Options& o) {
  analytics::AnalysisInput input;
  input.alpha = o.alpha;
  input.roster = analytics::read_roster(o.roster);
  std::vector<std::string> paths = expand_logs(o.logs);
  for (const auto& path : paths) {
    ReadResult r = read_log(path, o.strict);
    report_log_diagnostics(r);
    input.logs.push_back(std::move(r.log));
  }
  if (!o.reference.empty()) input.references = analytics::read_references(o.reference);
  if (!o.rater_a.empty() || !o.rater_b.empty()) {
    if (o.rater_a.empty() || o.rater_b.empty()) {
      throw Error(ErrorKind::kValidation, "--rater-a and --rater-b go together");
    }
    input.rater_a = analytics::read_tally_csv(o.rater_a);
    input.rater_b = analytics::read_tally_csv(o.rater_b);
  }
  analytics::AnalysisReport report = analytics::analyze(input);
  const std::string text = analytics::report_to_text(report);
  std::cout << text;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "report.json", analytics::report_to_json(report).dump(2) + "\n");
    write_file(fs::path(o.out) / "report.txt", text);
    // Run metadata lives apart from the report so reports stay byte-stable.
    nlohmann::json meta = {{"logs", paths}, {"roster", o.roster}, {"alpha", o.alpha}};
    write_file(fs::path(o.out) / "run-metadata.json", meta.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-language runtime, debugger and usage analytics"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run a program to completion and print its output");
  run->add_option("program", o.program, "Program file (.blk.json)")->required();
  run->add_option("--fuel", o.fuel, "Tick budget")->capture_default_str();

  auto* validate_cmd = app.add_subcommand("validate", "Check a program and print its hash");
  validate_cmd->add_option("program", o.program, "Program file")->required();

  auto* debug = app.add_subcommand("debug", "Drive a session with protocol requests from a file");
  debug->add_option("program", o.program, "Program file")->required();
  debug->add_option("--script", o.script, "Request lines (default stdin)");

  auto* serve = app.add_subcommand("serve", "Serve a debug session over stdio, TCP or WebSocket");
  serve->add_option("program", o.program, "Program file (optional; launch may send one)");
  serve->add_option("--port", o.port, "TCP port (default $BLOCKDBG_PORT)");
  serve->add_flag("--stdio", o.stdio, "Use stdin/stdout");
  serve->add_option("--ui", o.ui_dir, "Directory of static UI files");

  for (auto* sub : {debug, serve}) {
    sub->add_option("--log", o.log, "Session log (.dbglog.jsonl)");
    sub->add_option("--fuel", o.fuel, "Ticks per resume before pausing")->capture_default_str();
    sub->add_option("--subject", o.subject, "Subject id recorded in the log");
    sub->add_option("--group", o.group, "Experimental group (A or B)");
    sub->add_option("--breakpoint", o.breakpoints, "Launch breakpoint block id (repeatable)");
    sub->add_flag("--pause-on-entry,!--no-pause-on-entry", o.pause_on_entry,
                  "Pause before the first block (default on)");
  }
  serve->get_option("--log")->required();

  auto* replay_cmd = app.add_subcommand("replay", "Check that a session log reproduces");
  replay_cmd->add_option("program", o.program, "Program the session ran")->required();
  replay_cmd->add_option("--log", o.log, "Session log")->required();
  replay_cmd->add_flag("--strict", o.strict, "Reject malformed log lines");

  auto* analyze = app.add_subcommand("analyze", "Tally usage and test group differences");
  analyze->add_option("logs", o.logs, "Session logs or directories of them")->required();
  analyze->add_option("--roster", o.roster, "CSV: subject_id,group")->required();
  analyze->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
  analyze->add_option("--reference", o.reference, "Reference results JSON");
  analyze->add_option("--rater-a", o.rater_a, "First rater's tally CSV");
  analyze->add_option("--rater-b", o.rater_b, "Second rater's tally CSV");
  analyze->add_option("--out", o.out, "Directory for report.json, report.txt");
  analyze->add_flag("--strict", o.strict, "Reject malformed log lines");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(o);
    if (*validate_cmd) return cmd_validate(o);
    if (*debug) return cmd_debug(o);
    if (*serve) return cmd_serve(o);
    if (*replay_cmd) return cmd_replay(o);
    if (*analyze) return cmd_analyze(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_diagnostics(e);
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
