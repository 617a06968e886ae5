#include "blockdbg/protocol/server.hpp"

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/program_io.hpp"
#include "blockdbg/core/validate.hpp"

namespace blockdbg::protocol {
namespace {

using nlohmann::json;

// Failure raised by argument checking inside dispatch.
Error bad_args(const std::string& what) { return Error(ErrorKind::kMalformedEnvelope, what); }

std::string string_arg(const json& args, const char* key) {
  auto it = args.find(key);
  if (it == args.end() || !it->is_string()) throw bad_args(std::string("missing string '") + key + "'");
  return it->get<std::string>();
}

// A failure that still carries a useful payload (per-item results).
struct PartialFailure : Error {
  PartialFailure(ErrorKind kind, const std::string& what, json detail)
      : Error(kind, what), payload(std::move(detail)) {}
  json payload;
};

}  // namespace

void Outbox::send(Envelope envelope) {
  std::lock_guard<std::mutex> lock(mutex_);
  envelope.seq = next_seq_++;
  sink_(encode(envelope));
}

ProtocolServer::ProtocolServer(ServerOptions options, LogSink& sink)
    : options_(std::move(options)), sink_(sink) {}

ProtocolServer::~ProtocolServer() {
  if (session_) session_->set_observer(nullptr);
}

void ProtocolServer::attach(Outbox::Sink sink) {
  std::lock_guard<std::mutex> lock(outbox_mutex_);
  outbox_ = std::make_unique<Outbox>(std::move(sink));
}

void ProtocolServer::detach() {
  std::lock_guard<std::mutex> lock(outbox_mutex_);
  outbox_.reset();
}

void ProtocolServer::emit(const std::string& event, json payload) {
  std::lock_guard<std::mutex> lock(outbox_mutex_);
  if (!outbox_) return;
  Envelope e;
  e.kind = EnvelopeKind::kEvent;
  e.name = event;
  e.payload = std::move(payload);
  outbox_->send(std::move(e));
}

void ProtocolServer::respond(const Envelope& request, bool success, json payload,
                             std::optional<std::string> message) {
  std::lock_guard<std::mutex> lock(outbox_mutex_);
  if (!outbox_) return;
  Envelope r;
  r.kind = EnvelopeKind::kResponse;
  r.name = request.name;
  r.request_seq = request.seq;
  r.success = success;
  r.payload = std::move(payload);
  r.message = std::move(message);
  outbox_->send(std::move(r));
}

void ProtocolServer::on_log(const LogEvent& event) { emit("log", event_to_json(event)); }
void ProtocolServer::on_stopped(const PauseInfo& pause) { emit("stopped", pause_to_json(pause)); }
void ProtocolServer::on_continued() { emit("continued", json::object()); }
void ProtocolServer::on_output(const VmEvent& event) {
  emit("output", {{"text", event.text},
                  {"block", event.block},
                  {"category", event.kind == VmEvent::Kind::kOutput ? "say" : "warning"}});
}
void ProtocolServer::on_terminated() { emit("terminated", json::object()); }

void ProtocolServer::handle_line(std::string_view line) {
  if (line.find_first_not_of(" \t\r\n") == std::string_view::npos) return;
  Envelope request;
  try {
    request = decode(line);
  } catch (const Error& e) {
    Envelope unknown;
    unknown.seq = 0;
    respond(unknown, false, json::object(), std::string(e.what()));
    return;
  }
  if (request.kind != EnvelopeKind::kRequest) {
    respond(request, false, json::object(), std::string("expected a request"));
    return;
  }
  try {
    json payload = dispatch(request.name, request.payload);
    respond(request, true, std::move(payload), std::nullopt);
  } catch (const PartialFailure& e) {
    json payload = e.payload;
    payload["error"] = std::string(error_kind_name(e.kind()));
    respond(request, false, std::move(payload), std::string(e.what()));
  } catch (const ValidationError& e) {
    json diags = json::array();
    for (const auto& d : e.diagnostics()) diags.push_back(to_string(d));
    respond(request, false, {{"error", std::string(error_kind_name(e.kind()))}, {"diagnostics", diags}},
            std::string(e.what()));
  } catch (const Error& e) {
    respond(request, false, {{"error", std::string(error_kind_name(e.kind()))}}, std::string(e.what()));
  } catch (const json::exception& e) {
    respond(request, false, {{"error", "malformed-envelope"}}, std::string(e.what()));
  }
}

DebugSession& ProtocolServer::require_session() {
  if (!session_) throw Error(ErrorKind::kNotPaused, "no session; send launch first");
  return *session_;
}

json ProtocolServer::state_payload() const {
  json out = {{"status", std::string(status_name(session_->status()))}};
  auto pause = session_->paused_location();
  out["pause"] = pause ? pause_to_json(*pause) : json(nullptr);
  return out;
}

json ProtocolServer::dispatch(const std::string& command, const json& args) {
  if (command == "launch") {
    if (!session_) {
      SessionConfig config = options_.config;
      config.pause_on_entry = args.value("pause_on_entry", config.pause_on_entry);
      config.fuel = args.value("fuel", config.fuel);
      config.subject_id = args.value("subject_id", config.subject_id);
      if (args.contains("group")) {
        config.group = group_from_name(string_arg(args, "group")).value_or(Group::kUnspecified);
      }
      if (auto it = args.find("breakpoints"); it != args.end()) {
        config.breakpoints = it->get<std::vector<std::string>>();
      }
      auto program = options_.program;
      if (auto it = args.find("program"); it != args.end()) {
        program = std::make_shared<const Program>(program_from_json(*it));
      }
      if (!program) throw Error(ErrorKind::kInvalidProgram, "no program to launch");
      session_ = std::make_unique<DebugSession>(program, config, sink_, options_.clock, this);
      session_->set_command_queue(&queue_);
    } else if (args.value("restart", false)) {
      session_->restart();
    }
    json out = state_payload();
    out["session_id"] = session_->config().session_id;
    out["program"] = program_to_json(session_->program());
    json bps = json::array();
    for (const auto& [id, bp] : session_->breakpoints()) bps.push_back(id);
    out["breakpoints"] = bps;
    return out;
  }
  if (command == "load_program") {
    auto program = std::make_shared<const Program>(program_from_json(args.at("program")));
    if (session_) {
      session_->load_program(program);
    } else {
      auto diagnostics = validate(*program);
      if (has_errors(diagnostics)) throw ValidationError(ErrorKind::kInvalidProgram, diagnostics);
      options_.program = program;
    }
    return {{"hash", program_hash(*program)}};
  }
  if (command == "disconnect") {
    if (session_) session_->end_session();
    finished_ = true;
    queue_.close();
    return json::object();
  }

  DebugSession& s = require_session();
  if (command == "set_breakpoints") {
    auto it = args.find("blocks");
    if (it == args.end() || !it->is_array()) throw bad_args("missing array 'blocks'");
    json results = json::array();
    std::string failures;
    for (const auto& id : *it) {
      std::string block = id.get<std::string>();
      try {
        s.set_breakpoint(block);
        results.push_back({{"block", block}, {"verified", true}});
      } catch (const Error& e) {
        results.push_back({{"block", block}, {"verified", false}, {"message", e.what()}});
        failures += (failures.empty() ? "" : "; ") + std::string(e.what());
      }
    }
    if (!failures.empty()) {
      throw PartialFailure(ErrorKind::kUnknownBlockId, failures, {{"breakpoints", results}});
    }
    return {{"breakpoints", results}};
  }
  if (command == "clear_breakpoint") {
    s.clear_breakpoint(string_arg(args, "block"));
    return json::object();
  }
  if (command == "continue") {
    s.continue_();
    return state_payload();
  }
  if (command == "step_in") {
    s.step_in();
    return state_payload();
  }
  if (command == "step_over") {
    s.step_over();
    return state_payload();
  }
  if (command == "step_out") {
    s.step_out();
    return state_payload();
  }
  if (command == "add_watch") {
    return {{"id", s.add_watch(string_arg(args, "expression"))}};
  }
  if (command == "remove_watch") {
    auto it = args.find("id");
    if (it == args.end() || !it->is_number_integer()) throw bad_args("missing integer 'id'");
    s.remove_watch(it->get<int>());
    return json::object();
  }
  if (command == "eval_watches") {
    return {{"results", watch_results_to_json(s.eval_watches())}};
  }
  if (command == "inspect") {
    return snapshot_to_json(s.inspect_variables());
  }
  if (command == "edit_program") {
    s.apply_edit(edit_from_json(args.at("edit")));
    json out = state_payload();
    out["hash"] = program_hash(s.program());
    out["program"] = program_to_json(s.program());
    return out;
  }
  throw Error(ErrorKind::kUnknownCommand, "unknown command '" + command + "'");
}

void ProtocolServer::connection_closed(bool end_session) {
  detach();
  if (end_session) shutdown();
}

void ProtocolServer::shutdown() {
  if (session_) session_->end_session();
  finished_ = true;
  queue_.close();
}

}  // namespace blockdbg::protocol
