// Copyright 2026 The seqfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace seqfuzz {

struct HttpRequest {
  std::string method;
  std::string target;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  // Set when the request line or a header line did not parse; the other
  // fields then hold whatever was recovered.
  bool malformed = false;

  // Case-insensitive lookup; empty when absent.
  std::string header(std::string_view name) const;
};

struct HttpResponse {
  int status = 0;
  std::string reason;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;

  std::string header(std::string_view name) const;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;
};

// Parses `http://host:port[/...]`.
Endpoint parse_base_url(const std::string& url);

std::string reason_phrase(int status);

// A blocking HTTP/1.1 client connection. Requests go out byte-for-byte as
// given; only Host and Content-Length are added.
class HttpConnection {
 public:
  HttpConnection() = default;
  ~HttpConnection();
  HttpConnection(const HttpConnection&) = delete;
  HttpConnection& operator=(const HttpConnection&) = delete;

  bool connect(const Endpoint& ep, int timeout_ms);
  bool is_open() const { return fd_ >= 0; }
  void close();

  // `message` is a request line plus headers, a blank line and the body
  // (see to_http_message). Missing framing is tolerated: without a blank
  // line the whole message is treated as the head.
  std::optional<HttpResponse> send_message(const std::string& message);
  std::optional<HttpResponse> send(const std::string& method, const std::string& target,
                                   const std::string& body = {});

  const std::string& error() const { return error_; }

 private:
  bool write_all(const std::string& data);
  std::optional<HttpResponse> read_response();

  int fd_ = -1;
  int timeout_ms_ = 5000;
  Endpoint ep_;
  std::string buffer_;
  std::string error_;
};

// Single-threaded server: one accept loop, connections served in turn,
// so handler invocations never overlap.
class HttpServer {
 public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;

  explicit HttpServer(Handler handler) : handler_(std::move(handler)) {}
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds 127.0.0.1:port (0 picks a free port) and starts serving on a
  // background thread. Throws std::runtime_error if the port is taken.
  int start(int port = 0);
  void stop();
  int port() const { return port_; }

 private:
  void run();
  void serve_connection(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::thread thread_;
};

}  // namespace seqfuzz
