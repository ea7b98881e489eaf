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
#include <gtest/gtest.h>

#include "semcurate/protocol.hpp"

namespace semcurate {
namespace {

TEST(Protocol, HandshakeRoundTrip) {
  for (auto role : {WorkerRole::kGenerator, WorkerRole::kLabeller, WorkerRole::kDepth}) {
    const Handshake h{1, role};
    const Handshake back = parse_handshake(encode_handshake(h));
    EXPECT_EQ(back.role, role);
    EXPECT_EQ(back.version, 1);
  }
  EXPECT_THROW(parse_handshake("{\"v\":2,\"role\":\"generator\"}"), ProtocolError);
  EXPECT_THROW(parse_handshake("{\"v\":1,\"role\":\"painter\"}"), Error);
  EXPECT_THROW(parse_handshake("hello"), ProtocolError);
}

TEST(Protocol, RequestRoundTrip) {
  const Request gen = GenerateRequest{7, "sources/a.png", 42, 10, "images/a/cand"};
  const Request lab = LabelRequest{8, "images/a/cand_0.png", "labels/a/cand_0.png"};
  const Request dep = DepthRequest{9, "images/a/cand_0.png", "depth/a.png"};
  const Request quit = QuitRequest{10};
  for (const Request& r : {gen, lab, dep, quit}) {
    const std::string line = encode_request(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const Request back = parse_request(line);
    EXPECT_EQ(back.index(), r.index());
    EXPECT_EQ(request_id(back), request_id(r));
  }
  const auto g = std::get<GenerateRequest>(parse_request(encode_request(gen)));
  EXPECT_EQ(g.label, "sources/a.png");
  EXPECT_EQ(g.seed, 42u);
  EXPECT_EQ(g.n, 10u);
  EXPECT_EQ(g.out_prefix, "images/a/cand");
}

TEST(Protocol, MalformedRequestsKeepTheirId) {
  try {
    parse_request("{\"v\":1,\"id\":5,\"op\":\"paint\"}");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.id(), std::optional<std::uint64_t>(5));
  }
  try {
    parse_request("{\"v\":1,\"id\":6,\"op\":\"generate\"}");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_EQ(e.id(), std::optional<std::uint64_t>(6));
  }
  try {
    parse_request("{{{");
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_FALSE(e.id().has_value());
  }
}

TEST(Protocol, RefsMustStayInWorkdir) {
  EXPECT_TRUE(is_confined_ref("images/a.png"));
  EXPECT_FALSE(is_confined_ref("/etc/passwd"));
  EXPECT_FALSE(is_confined_ref("../x.png"));
  EXPECT_FALSE(is_confined_ref("a/../../x.png"));
  EXPECT_FALSE(is_confined_ref(""));
}

TEST(Protocol, ResponseRoundTrip) {
  Response ok;
  ok.id = 3;
  ok.ok = true;
  ok.images = {"a_0.png", "a_1.png"};
  const Response back = parse_response(encode_response(ok));
  EXPECT_EQ(back.id, 3u);
  EXPECT_TRUE(back.ok);
  EXPECT_EQ(back.images, ok.images);

  Response err;
  err.id = 4;
  err.error = "boom";
  const Response eback = parse_response(encode_response(err));
  EXPECT_FALSE(eback.ok);
  EXPECT_EQ(eback.error, "boom");

  EXPECT_THROW(parse_response("nope"), ProtocolError);
  EXPECT_THROW(parse_response(encode_protocol_error("bad line")), ProtocolError);
}

}  // namespace
}  // namespace semcurate
