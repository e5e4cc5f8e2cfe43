// Copyright 2026 The vmsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// WebSocket transport for one operator at a time. Frames from the session are
// flushed on a short timer; each outgoing frame gets the next server sequence
// number of the connection.

#ifndef VMSIM_SERVER_HPP_
#define VMSIM_SERVER_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "vmsim/session.hpp"

namespace vmsim {

struct Endpoint {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;
};

// Parses "host:port" (port 0 picks a free port). Throws std::invalid_argument.
Endpoint ParseEndpoint(std::string_view text);

struct ServerOptions {
  std::chrono::milliseconds flush_period{5};
  std::size_t write_queue_limit = 1024;  // frames; the oldest are dropped beyond
};

class SessionServer {
 public:
  // Binds immediately; throws std::runtime_error if the address is unusable.
  SessionServer(SessionHandler& handler, const Endpoint& endpoint, ServerOptions options = {});
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;
  void Start();
  void Stop();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// Minimal blocking client used by tests and the acceptance check.
class SessionClient {
 public:
  SessionClient(const std::string& host, unsigned short port);
  ~SessionClient();
  SessionClient(const SessionClient&) = delete;
  SessionClient& operator=(const SessionClient&) = delete;

  void SendText(const std::string& text);
  // Sends a client frame with the next sequence number; returns that number.
  std::uint64_t Send(MessageKind kind, const nlohmann::json& payload);
  // Blocks up to `timeout`; returns an empty string on timeout.
  std::string Receive(std::chrono::milliseconds timeout);
  void Close();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace vmsim

#endif  // VMSIM_SERVER_HPP_
