#include "blockdbg/protocol/envelope.hpp"

#include "blockdbg/core/error.hpp"

namespace blockdbg::protocol {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::kMalformedEnvelope, "malformed envelope: " + what);
}

}  // namespace

std::string_view kind_name(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::kRequest: return "request";
    case EnvelopeKind::kResponse: return "response";
    case EnvelopeKind::kEvent: return "event";
  }
  return "request";
}

std::string encode(const Envelope& e) {
  json doc = {{"seq", e.seq}, {"kind", std::string(kind_name(e.kind))}, {"payload", e.payload}};
  doc[e.kind == EnvelopeKind::kEvent ? "event" : "command"] = e.name;
  if (e.request_seq) doc["request_seq"] = *e.request_seq;
  if (e.success) doc["success"] = *e.success;
  if (e.message) doc["message"] = *e.message;
  return doc.dump();
}

Envelope decode(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("not a JSON object");

  Envelope e;
  auto seq = doc.find("seq");
  if (seq == doc.end() || !seq->is_number_integer()) malformed("'seq' must be an integer");
  e.seq = seq->get<std::int64_t>();

  auto kind = doc.find("kind");
  if (kind == doc.end() || !kind->is_string()) malformed("'kind' must be a string");
  std::string k = kind->get<std::string>();
  if (k == "request") {
    e.kind = EnvelopeKind::kRequest;
  } else if (k == "response") {
    e.kind = EnvelopeKind::kResponse;
  } else if (k == "event") {
    e.kind = EnvelopeKind::kEvent;
  } else {
    malformed("unknown kind '" + k + "'");
  }

  const char* name_key = e.kind == EnvelopeKind::kEvent ? "event" : "command";
  auto name = doc.find(name_key);
  if (name == doc.end() || !name->is_string()) malformed(std::string("'") + name_key + "' must be a string");
  e.name = name->get<std::string>();

  if (auto p = doc.find("payload"); p != doc.end()) {
    if (!p->is_object()) malformed("'payload' must be an object");
    e.payload = *p;
  }
  if (e.kind == EnvelopeKind::kResponse) {
    auto rs = doc.find("request_seq");
    if (rs == doc.end() || !rs->is_number_integer()) malformed("'request_seq' must be an integer");
    e.request_seq = rs->get<std::int64_t>();
    auto ok = doc.find("success");
    if (ok == doc.end() || !ok->is_boolean()) malformed("'success' must be a boolean");
    e.success = ok->get<bool>();
    if (auto m = doc.find("message"); m != doc.end()) {
      if (!m->is_string()) malformed("'message' must be a string");
      e.message = m->get<std::string>();
    }
  }
  return e;
}

}  // namespace blockdbg::protocol
