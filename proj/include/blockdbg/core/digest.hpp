#pragma once

#include <string>
#include <string_view>

namespace blockdbg {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Raw 20-byte SHA-1 digest (WebSocket handshake only).
std::string sha1_raw(std::string_view data);

std::string base64_encode(std::string_view data);

}  // namespace blockdbg
