/* Copyright 2026 The semcurate Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "semcurate/protocol.hpp"

#include "json.hpp"

namespace semcurate {
namespace {

using nlohmann::json;

json parse_line(std::string_view line) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ProtocolError("protocol: line is not a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("protocol: malformed line: ") + e.what());
  }
}

void check_version(const json& j, std::optional<std::uint64_t> id) {
  if (!j.contains("v") || !j.at("v").is_number_integer() || j.at("v").get<int>() != kProtocolVersion) {
    throw ProtocolError("protocol: unsupported or missing version", id);
  }
}

std::string get_string(const json& j, const char* key, std::optional<std::uint64_t> id) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ProtocolError(std::string("protocol: missing string field '") + key + "'", id);
  }
  return j.at(key).get<std::string>();
}

std::uint64_t get_u64(const json& j, const char* key, std::optional<std::uint64_t> id) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw ProtocolError(std::string("protocol: missing unsigned field '") + key + "'", id);
  }
  return j.at(key).get<std::uint64_t>();
}

std::optional<std::uint64_t> peek_id(const json& j) {
  if (j.contains("id") && j.at("id").is_number_unsigned()) return j.at("id").get<std::uint64_t>();
  return std::nullopt;
}

}  // namespace

std::string_view to_string(WorkerRole role) {
  switch (role) {
    case WorkerRole::kGenerator: return "generator";
    case WorkerRole::kLabeller: return "labeller";
    case WorkerRole::kDepth: return "depth";
  }
  return "generator";
}

WorkerRole parse_worker_role(std::string_view text) {
  if (text == "generator") return WorkerRole::kGenerator;
  if (text == "labeller") return WorkerRole::kLabeller;
  if (text == "depth") return WorkerRole::kDepth;
  throw Error(ErrorKind::kInvalidArgument, "unknown worker role '" + std::string(text) + "'");
}

std::uint64_t request_id(const Request& request) {
  return std::visit([](const auto& r) { return r.id; }, request);
}

std::string encode_handshake(const Handshake& h) {
  return json{{"v", h.version}, {"role", std::string(to_string(h.role))}}.dump();
}

Handshake parse_handshake(std::string_view line) {
  const json j = parse_line(line);
  check_version(j, std::nullopt);
  Handshake h;
  try {
    h.role = parse_worker_role(get_string(j, "role", std::nullopt));
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(std::string("protocol: bad handshake: ") + e.what());
  }
  return h;
}

std::string encode_request(const Request& request) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        json j = {{"v", kProtocolVersion}, {"id", r.id}};
        if constexpr (std::is_same_v<T, GenerateRequest>) {
          j["op"] = "generate";
          j["label"] = r.label;
          j["seed"] = r.seed;
          j["n"] = r.n;
          j["out_prefix"] = r.out_prefix;
        } else if constexpr (std::is_same_v<T, LabelRequest>) {
          j["op"] = "label";
          j["image"] = r.image;
          j["out"] = r.out;
        } else if constexpr (std::is_same_v<T, DepthRequest>) {
          j["op"] = "depth";
          j["image"] = r.image;
          j["out"] = r.out;
        } else {
          j["op"] = "quit";
        }
        return j.dump();
      },
      request);
}

Request parse_request(std::string_view line) {
  const json j = parse_line(line);
  const auto id = peek_id(j);
  check_version(j, id);
  if (!id) throw ProtocolError("protocol: request without a valid id");
  const std::string op = get_string(j, "op", id);
  if (op == "generate") {
    GenerateRequest r;
    r.id = *id;
    r.label = get_string(j, "label", id);
    r.seed = get_u64(j, "seed", id);
    const auto n = get_u64(j, "n", id);
    if (n == 0 || n > 1'000'000) throw ProtocolError("protocol: n out of range", id);
    r.n = static_cast<std::uint32_t>(n);
    r.out_prefix = get_string(j, "out_prefix", id);
    return r;
  }
  if (op == "label" || op == "depth") {
    const std::string image = get_string(j, "image", id);
    const std::string out = get_string(j, "out", id);
    if (op == "label") return LabelRequest{*id, image, out};
    return DepthRequest{*id, image, out};
  }
  if (op == "quit") return QuitRequest{*id};
  throw ProtocolError("protocol: unknown op '" + op + "'", id);
}

std::string encode_response(const Response& r) {
  json j = {{"v", kProtocolVersion}, {"id", r.id}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
  } else {
    if (!r.images.empty()) j["images"] = r.images;
    if (r.label) j["label"] = *r.label;
    if (r.depth) j["depth"] = *r.depth;
  }
  return j.dump();
}

Response parse_response(std::string_view line) {
  const json j = parse_line(line);
  const auto id = peek_id(j);
  check_version(j, id);
  if (!id) {
    const std::string msg = j.contains("error") && j.at("error").is_string()
                                ? j.at("error").get<std::string>()
                                : std::string("response without a valid id");
    throw ProtocolError("protocol: " + msg);
  }
  if (!j.contains("ok") || !j.at("ok").is_boolean()) {
    throw ProtocolError("protocol: response without 'ok'", id);
  }
  Response r;
  r.id = *id;
  r.ok = j.at("ok").get<bool>();
  if (!r.ok) {
    r.error = j.contains("error") && j.at("error").is_string() ? j.at("error").get<std::string>()
                                                               : std::string("unspecified error");
    return r;
  }
  try {
    if (j.contains("images")) r.images = j.at("images").get<std::vector<std::string>>();
    if (j.contains("label")) r.label = j.at("label").get<std::string>();
    if (j.contains("depth")) r.depth = j.at("depth").get<std::string>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("protocol: bad response payload: ") + e.what(), id);
  }
  return r;
}

std::string encode_protocol_error(std::string_view message) {
  return json{{"v", kProtocolVersion}, {"ok", false}, {"error", std::string(message)}}.dump();
}

bool is_confined_ref(std::string_view ref) {
  if (ref.empty() || ref.front() == '/' || ref.front() == '\\') return false;
  if (ref.find('\0') != std::string_view::npos || ref.find('\\') != std::string_view::npos) return false;
  std::size_t pos = 0;
  while (pos <= ref.size()) {
    auto slash = ref.find('/', pos);
    if (slash == std::string_view::npos) slash = ref.size();
    if (ref.substr(pos, slash - pos) == "..") return false;
    pos = slash + 1;
  }
  return true;
}

}  // namespace semcurate
