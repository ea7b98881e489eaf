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

#ifndef SEMCURATE_PROTOCOL_HPP_
#define SEMCURATE_PROTOCOL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semcurate/error.hpp"

namespace semcurate {

// Worker wire protocol v1: one JSON object per line over the worker's
// stdin/stdout. The worker speaks first with a handshake naming its role.
//
//   -> {"v":1,"id":7,"op":"generate","label":"a.png","seed":3,"n":2,"out_prefix":"img/a"}
//   <- {"v":1,"id":7,"ok":true,"images":["img/a_0.png","img/a_1.png"]}
//   -> {"v":1,"id":8,"op":"label","image":"img/a_0.png","out":"lab/a_0.png"}
//   <- {"v":1,"id":8,"ok":true,"label":"lab/a_0.png"}
//   <- {"v":1,"id":9,"ok":false,"error":"..."}
//   -> {"v":1,"id":10,"op":"quit"}

inline constexpr int kProtocolVersion = 1;

enum class WorkerRole { kGenerator, kLabeller, kDepth };

std::string_view to_string(WorkerRole role);
WorkerRole parse_worker_role(std::string_view text);

struct Handshake {
  int version = kProtocolVersion;
  WorkerRole role = WorkerRole::kGenerator;
};

struct GenerateRequest {
  std::uint64_t id = 0;
  std::string label;
  std::uint64_t seed = 0;
  std::uint32_t n = 1;
  std::string out_prefix;
};

struct LabelRequest {
  std::uint64_t id = 0;
  std::string image;
  std::string out;
};

struct DepthRequest {
  std::uint64_t id = 0;
  std::string image;
  std::string out;
};

struct QuitRequest {
  std::uint64_t id = 0;
};

using Request = std::variant<GenerateRequest, LabelRequest, DepthRequest, QuitRequest>;

std::uint64_t request_id(const Request& request);

struct Response {
  std::uint64_t id = 0;
  bool ok = false;
  std::vector<std::string> images;  // generate
  std::optional<std::string> label;  // label
  std::optional<std::string> depth;  // depth
  std::string error;
};

std::string encode_handshake(const Handshake& handshake);
Handshake parse_handshake(std::string_view line);

std::string encode_request(const Request& request);
// Throws ProtocolError; its id() is set when the line carried a readable id.
Request parse_request(std::string_view line);

std::string encode_response(const Response& response);
Response parse_response(std::string_view line);

// Line emitted when a request was too malformed to recover an id.
std::string encode_protocol_error(std::string_view message);

class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& message, std::optional<std::uint64_t> id = std::nullopt)
      : Error(ErrorKind::kProtocol, message), id_(id) {}
  std::optional<std::uint64_t> id() const noexcept { return id_; }

 private:
  std::optional<std::uint64_t> id_;
};

// A ref must be relative, non-empty and must not climb out of the workdir.
bool is_confined_ref(std::string_view ref);

}  // namespace semcurate

#endif  // SEMCURATE_PROTOCOL_HPP_
