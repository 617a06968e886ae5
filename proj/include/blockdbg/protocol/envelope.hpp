#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace blockdbg::protocol {

enum class EnvelopeKind { kRequest, kResponse, kEvent };

// One wire message. `name` is the command for requests/responses and the
// event name for events.
struct Envelope {
  std::int64_t seq = 0;
  EnvelopeKind kind = EnvelopeKind::kRequest;
  std::string name;
  nlohmann::json payload = nlohmann::json::object();
  std::optional<std::int64_t> request_seq;  // responses only
  std::optional<bool> success;              // responses only
  std::optional<std::string> message;       // failed responses

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

std::string_view kind_name(EnvelopeKind kind);

// Serializes to a single line (no trailing newline).
std::string encode(const Envelope& envelope);

// Parses exactly one JSON document; anything else on the line, a missing
// field or a wrong type throws Error{kMalformedEnvelope}.
Envelope decode(std::string_view line);

}  // namespace blockdbg::protocol
