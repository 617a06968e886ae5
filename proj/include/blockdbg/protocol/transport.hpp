#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockdbg/protocol/server.hpp"

namespace blockdbg::protocol {

// Set from signal handlers (or tests); transports poll it and end the
// session cleanly.
std::atomic<bool>& stop_flag();
void install_stop_signal_handlers();

// Serves one NDJSON stream on a pair of file descriptors. The calling thread
// becomes the engine thread. EOF on `in_fd` ends the session.
void serve_fds(ProtocolServer& server, int in_fd, int out_fd);

// WebSocket framing (server side: outgoing frames unmasked).
std::string websocket_accept_key(const std::string& client_key);
std::string websocket_text_frame(const std::string& payload);

enum class WsOpcode : std::uint8_t {
  kContinuation = 0x0,
  kText = 0x1,
  kBinary = 0x2,
  kClose = 0x8,
  kPing = 0x9,
  kPong = 0xA,
};

struct WsFrame {
  bool fin = true;
  WsOpcode opcode = WsOpcode::kText;
  std::string payload;  // unmasked
};

// Consumes one complete frame from the front of `buffer`; nullopt when more
// bytes are needed. Throws Error{kMalformedEnvelope} on protocol errors.
std::optional<WsFrame> take_websocket_frame(std::string& buffer);

// Encodes a client (masked) frame; used by tests and tooling.
std::string websocket_client_frame(WsOpcode opcode, const std::string& payload, bool fin = true,
                                   std::uint32_t mask = 0x1234abcd);

class TcpListener {
 public:
  // Binds 127.0.0.1:`port` (0 picks a free port). Throws Error{kPortInUse}.
  explicit TcpListener(std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

struct TcpServeOptions {
  std::optional<std::string> ui_dir;  // static files served for plain GETs
};

// Accepts connections one at a time until the session finishes or the stop
// flag is raised. Each connection is either a raw NDJSON stream or (when it
// opens with an HTTP GET carrying an Upgrade header) a WebSocket whose text
// messages are envelopes. Dropping a connection keeps the session alive.
void serve_tcp(ProtocolServer& server, TcpListener& listener, const TcpServeOptions& options = {});

}  // namespace blockdbg::protocol
