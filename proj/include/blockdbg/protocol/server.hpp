#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "blockdbg/debug/session.hpp"
#include "blockdbg/protocol/envelope.hpp"

namespace blockdbg::protocol {

// Serializes outgoing messages for one connection and numbers them.
// Usable from any thread.
class Outbox {
 public:
  using Sink = std::function<void(const std::string& line)>;

  explicit Outbox(Sink sink) : sink_(std::move(sink)) {}

  void send(Envelope envelope);

 private:
  std::mutex mutex_;
  Sink sink_;
  std::int64_t next_seq_ = 1;
};

struct ServerOptions {
  std::shared_ptr<const Program> program;  // used by launch when no program is sent
  SessionConfig config;                    // launch defaults
  SessionClock clock = steady_session_clock();
};

// Maps protocol requests onto a DebugSession. All handle_* calls must come
// from the engine thread; commands received while the engine is running are
// posted to `queue()` and applied between ticks.
class ProtocolServer : public SessionObserver {
 public:
  ProtocolServer(ServerOptions options, LogSink& sink);
  ~ProtocolServer() override;

  // Switches output to a new connection (resetting outgoing seq to 1).
  void attach(Outbox::Sink sink);
  void detach();

  // Decodes and dispatches one line. Malformed input yields a failed
  // response; the connection stays usable.
  void handle_line(std::string_view line);

  // Connection dropped without disconnect: the session stays alive for a
  // reconnect unless `end_session` is set (stdio).
  void connection_closed(bool end_session);

  // Ends the session (signal or shutdown) if one is running.
  void shutdown();

  bool finished() const { return finished_; }
  CommandQueue& queue() { return queue_; }
  DebugSession* session() { return session_.get(); }

  // SessionObserver
  void on_log(const LogEvent& event) override;
  void on_stopped(const PauseInfo& pause) override;
  void on_continued() override;
  void on_output(const VmEvent& event) override;
  void on_terminated() override;

 private:
  nlohmann::json dispatch(const std::string& command, const nlohmann::json& args);
  nlohmann::json state_payload() const;
  DebugSession& require_session();
  void emit(const std::string& event, nlohmann::json payload);
  void respond(const Envelope& request, bool success, nlohmann::json payload,
               std::optional<std::string> message);

  ServerOptions options_;
  LogSink& sink_;
  CommandQueue queue_;
  std::unique_ptr<DebugSession> session_;
  std::unique_ptr<Outbox> outbox_;
  std::mutex outbox_mutex_;
  std::atomic<bool> finished_{false};
};

}  // namespace blockdbg::protocol
