#include "blockdbg/protocol/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "blockdbg/core/digest.hpp"
#include "blockdbg/core/error.hpp"

namespace blockdbg::protocol {
namespace {

constexpr int kPollMs = 100;
constexpr std::size_t kMaxFrame = 16u << 20;
constexpr std::size_t kMaxHeader = 64u << 10;

extern "C" void on_stop_signal(int) { stop_flag().store(true); }

bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::send(fd, data.data() + done, data.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

// Waits for input; returns >0 when readable, 0 on timeout.
int wait_readable(int fd) {
  pollfd p{fd, POLLIN, 0};
  int r = ::poll(&p, 1, kPollMs);
  if (r < 0 && errno == EINTR) return 0;
  return r;
}

bool should_stop(ProtocolServer& server) { return stop_flag().load() || server.finished(); }

// Reads what is available; empty string with `eof` set at end of stream.
std::string read_some(int fd, bool& eof) {
  char buf[4096];
  ssize_t n = ::read(fd, buf, sizeof buf);
  if (n <= 0) {
    eof = !(n < 0 && (errno == EINTR || errno == EAGAIN));
    return {};
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

// Posts each complete line of `buffer` to the engine.
void post_lines(ProtocolServer& server, std::string& buffer) {
  std::size_t start = 0;
  for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
    std::string line = buffer.substr(start, nl - start);
    server.queue().post([&server, line] { server.handle_line(line); });
  }
  buffer.erase(0, start);
}

std::string server_frame(WsOpcode opcode, const std::string& payload) {
  std::string out;
  out.push_back(static_cast<char>(0x80 | static_cast<std::uint8_t>(opcode)));
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(126));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(127));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  return out + payload;
}

// A socket shared between the reader and the engine (which writes).
class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  ~Connection() { close(); }

  bool write(const std::string& data) {
    std::lock_guard<std::mutex> lock(mutex_);
    return open_ && write_all(fd_, data);
  }
  void close() {
    std::lock_guard<std::mutex> lock(mutex_);
    if (open_) ::close(fd_);
    open_ = false;
  }
  int fd() const { return fd_; }

 private:
  std::mutex mutex_;
  int fd_;
  bool open_ = true;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::vector<std::pair<std::string, std::string>> headers;

  std::optional<std::string> header(std::string_view name) const {
    for (const auto& [k, v] : headers) {
      if (k.size() == name.size() &&
          std::equal(k.begin(), k.end(), name.begin(),
                     [](char a, char b) { return std::tolower(a) == std::tolower(b); })) {
        return v;
      }
    }
    return std::nullopt;
  }
};

HttpRequest parse_http_head(const std::string& head) {
  HttpRequest req;
  std::istringstream in(head);
  std::string line;
  std::getline(in, line);
  std::istringstream first(line);
  first >> req.method >> req.path;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    req.headers.emplace_back(line.substr(0, colon), value);
  }
  return req;
}

std::string content_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

std::string http_response(int status, const std::string& reason, const std::string& type,
                          const std::string& body) {
  std::ostringstream out;
  out << "HTTP/1.1 " << status << ' ' << reason << "\r\nContent-Type: " << type
      << "\r\nContent-Length: " << body.size() << "\r\nConnection: close\r\n\r\n" << body;
  return out.str();
}

void serve_static(Connection& conn, const HttpRequest& req, const TcpServeOptions& options) {
  std::string path = req.path.substr(0, req.path.find('?'));
  if (!options.ui_dir || req.method != "GET" || path.find("..") != std::string::npos) {
    conn.write(http_response(404, "Not Found", "text/plain", "not found\n"));
    return;
  }
  if (path.empty() || path.back() == '/') path += "index.html";
  std::filesystem::path file = std::filesystem::path(*options.ui_dir) / path.substr(1);
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    conn.write(http_response(404, "Not Found", "text/plain", "not found\n"));
    return;
  }
  std::ostringstream body;
  body << in.rdbuf();
  conn.write(http_response(200, "OK", content_type(file), body.str()));
}

// Runs a WebSocket session on `conn`; `buffer` holds bytes after the
// handshake head.
void websocket_loop(ProtocolServer& server, const std::shared_ptr<Connection>& conn,
                    std::string buffer) {
  server.queue().post([&server, conn] {
    server.attach([conn](const std::string& line) {
      conn->write(server_frame(WsOpcode::kText, line));
    });
  });
  std::string message;
  bool eof = false;
  while (!should_stop(server) && !eof) {
    try {
      while (auto frame = take_websocket_frame(buffer)) {
        switch (frame->opcode) {
          case WsOpcode::kText:
          case WsOpcode::kBinary:
            message = frame->payload;
            break;
          case WsOpcode::kContinuation:
            message += frame->payload;
            break;
          case WsOpcode::kPing:
            conn->write(server_frame(WsOpcode::kPong, frame->payload));
            continue;
          case WsOpcode::kPong:
            continue;
          case WsOpcode::kClose:
            conn->write(server_frame(WsOpcode::kClose, frame->payload.substr(0, 2)));
            eof = true;
            continue;
        }
        if (frame->fin) {
          std::string text = std::move(message);
          message.clear();
          server.queue().post([&server, text] { server.handle_line(text); });
        }
      }
    } catch (const Error&) {
      conn->write(server_frame(WsOpcode::kClose, std::string("\x03\xea", 2)));
      break;
    }
    if (eof || wait_readable(conn->fd()) <= 0) continue;
    buffer += read_some(conn->fd(), eof);
  }
}

void ndjson_loop(ProtocolServer& server, const std::shared_ptr<Connection>& conn, std::string buffer) {
  server.queue().post([&server, conn] {
    server.attach([conn](const std::string& line) { conn->write(line + "\n"); });
  });
  bool eof = false;
  for (;;) {
    post_lines(server, buffer);
    if (eof || should_stop(server)) break;
    if (wait_readable(conn->fd()) <= 0) continue;
    buffer += read_some(conn->fd(), eof);
  }
}

void handle_connection(ProtocolServer& server, int fd, const TcpServeOptions& options) {
  auto conn = std::make_shared<Connection>(fd);
  std::string buffer;
  bool eof = false;
  // Sniff the first bytes: an HTTP request or a raw NDJSON stream.
  while (!eof && !should_stop(server) && buffer.size() < 4 && buffer.find('\n') == std::string::npos) {
    if (wait_readable(fd) > 0) buffer += read_some(fd, eof);
  }
  if (buffer.rfind("GET ", 0) == 0) {
    std::size_t end;
    while ((end = buffer.find("\r\n\r\n")) == std::string::npos && !eof && !should_stop(server) &&
           buffer.size() < kMaxHeader) {
      if (wait_readable(fd) > 0) buffer += read_some(fd, eof);
    }
    if (end == std::string::npos) return;
    HttpRequest req = parse_http_head(buffer.substr(0, end));
    auto upgrade = req.header("Upgrade");
    auto key = req.header("Sec-WebSocket-Key");
    if (upgrade && key) {
      conn->write("HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                  "Sec-WebSocket-Accept: " + websocket_accept_key(*key) + "\r\n\r\n");
      websocket_loop(server, conn, buffer.substr(end + 4));
    } else {
      serve_static(*conn, req, options);
      return;
    }
  } else {
    ndjson_loop(server, conn, std::move(buffer));
  }
  // Let the engine detach before the socket closes.
  server.queue().post([&server, conn] {
    server.connection_closed(false);
    conn->close();
  });
}

}  // namespace

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

void install_stop_signal_handlers() {
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);
}

void serve_fds(ProtocolServer& server, int in_fd, int out_fd) {
  server.attach([out_fd](const std::string& line) { write_all(out_fd, line + "\n"); });
  // EOF ends the session only after earlier requests finish; a sentinel
  // drained mid-run must not cut that run short. Signals end it at once.
  bool input_ended = false;
  std::thread reader([&server, &input_ended, in_fd] {
    std::string buffer;
    bool eof = false;
    for (;;) {
      post_lines(server, buffer);
      if (eof || should_stop(server)) break;
      if (wait_readable(in_fd) <= 0) continue;
      buffer += read_some(in_fd, eof);
    }
    if (!buffer.empty()) {
      server.queue().post([&server, line = buffer] { server.handle_line(line); });
    }
    if (stop_flag().load()) {
      server.queue().post([&server] { server.connection_closed(true); });
    } else {
      server.queue().post([&input_ended] { input_ended = true; });
    }
  });
  while (server.queue().run_one()) {
    if (input_ended) {
      input_ended = false;
      server.connection_closed(true);
    }
  }
  reader.join();
}

std::string websocket_accept_key(const std::string& client_key) {
  return base64_encode(sha1_raw(client_key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"));
}

std::string websocket_text_frame(const std::string& payload) {
  return server_frame(WsOpcode::kText, payload);
}

std::optional<WsFrame> take_websocket_frame(std::string& buffer) {
  if (buffer.size() < 2) return std::nullopt;
  const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(buffer[i]); };
  WsFrame frame;
  frame.fin = (byte(0) & 0x80) != 0;
  const std::uint8_t op = byte(0) & 0x0F;
  if (op != 0x0 && op != 0x1 && op != 0x2 && op != 0x8 && op != 0x9 && op != 0xA) {
    throw Error(ErrorKind::kMalformedEnvelope, "unknown websocket opcode");
  }
  frame.opcode = static_cast<WsOpcode>(op);
  const bool masked = (byte(1) & 0x80) != 0;
  std::uint64_t len = byte(1) & 0x7F;
  std::size_t pos = 2;
  if (len == 126) {
    if (buffer.size() < 4) return std::nullopt;
    len = (std::uint64_t{byte(2)} << 8) | byte(3);
    pos = 4;
  } else if (len == 127) {
    if (buffer.size() < 10) return std::nullopt;
    len = 0;
    for (std::size_t i = 2; i < 10; ++i) len = (len << 8) | byte(i);
    pos = 10;
  }
  if (len > kMaxFrame) throw Error(ErrorKind::kMalformedEnvelope, "websocket frame too large");
  if (!masked) throw Error(ErrorKind::kMalformedEnvelope, "client frames must be masked");
  if (buffer.size() < pos + 4 + len) return std::nullopt;
  const std::size_t key_at = pos;
  pos += 4;
  frame.payload = buffer.substr(pos, static_cast<std::size_t>(len));
  for (std::size_t i = 0; i < frame.payload.size(); ++i) {
    frame.payload[i] = static_cast<char>(frame.payload[i] ^ buffer[key_at + i % 4]);
  }
  buffer.erase(0, pos + static_cast<std::size_t>(len));
  return frame;
}

std::string websocket_client_frame(WsOpcode opcode, const std::string& payload, bool fin,
                                   std::uint32_t mask) {
  std::string out;
  out.push_back(static_cast<char>((fin ? 0x80 : 0) | static_cast<std::uint8_t>(opcode)));
  const std::size_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(0x80 | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(0x80 | 126));
    out.push_back(static_cast<char>((n >> 8) & 0xFF));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(0x80 | 127));
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((n >> shift) & 0xFF));
  }
  const char key[4] = {static_cast<char>(mask >> 24), static_cast<char>(mask >> 16),
                       static_cast<char>(mask >> 8), static_cast<char>(mask)};
  out.append(key, 4);
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(payload[i] ^ key[i % 4]));
  return out;
}

TcpListener::TcpListener(std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error(ErrorKind::kStorage, std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd_);
    if (err == EADDRINUSE) {
      throw Error(ErrorKind::kPortInUse, "port " + std::to_string(port) + " is already in use");
    }
    throw Error(ErrorKind::kStorage, std::string("bind: ") + std::strerror(err));
  }
  if (::listen(fd_, 4) != 0) {
    ::close(fd_);
    throw Error(ErrorKind::kStorage, std::string("listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

void serve_tcp(ProtocolServer& server, TcpListener& listener, const TcpServeOptions& options) {
  std::thread network([&] {
    while (!should_stop(server)) {
      if (wait_readable(listener.fd()) <= 0) continue;
      int fd = ::accept(listener.fd(), nullptr, nullptr);
      if (fd < 0) continue;
      handle_connection(server, fd, options);
    }
    // Signal path: end the session from the engine thread.
    server.queue().post([&server] { server.shutdown(); });
  });
  while (server.queue().run_one()) {
  }
  network.join();
}

}  // namespace blockdbg::protocol
