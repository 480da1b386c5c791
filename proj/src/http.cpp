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

#include "seqfuzz/http.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <stdexcept>

#include "seqfuzz/util.hpp"

namespace seqfuzz {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string find_header(const std::vector<std::pair<std::string, std::string>>& headers, std::string_view name) {
  auto want = lower(name);
  for (const auto& [k, v] : headers)
    if (lower(k) == want) return v;
  return {};
}

bool wait_fd(int fd, short events, int timeout_ms) {
  pollfd p{fd, events, 0};
  return ::poll(&p, 1, timeout_ms) > 0;
}

// Reads until `buffer` holds a full head (terminated by CRLF CRLF) and the
// body announced by Content-Length. Returns false on EOF/timeout.
bool read_message(int fd, std::string& buffer, int timeout_ms, std::string& head, std::string& body,
                  const std::atomic<bool>* running = nullptr) {
  std::size_t head_end;
  char chunk[65536];
  auto fill = [&]() {
    while (true) {
      if (running && !*running) return false;
      if (!wait_fd(fd, POLLIN, running ? 100 : timeout_ms)) {
        if (running) {
          timeout_ms -= 100;
          if (timeout_ms > 0) continue;
        }
        return false;
      }
      auto n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n <= 0) return false;
      buffer.append(chunk, static_cast<std::size_t>(n));
      return true;
    }
  };
  while ((head_end = buffer.find("\r\n\r\n")) == std::string::npos)
    if (!fill()) return false;
  head = buffer.substr(0, head_end);
  std::size_t length = 0;
  for (const auto& line : split(head, '\n')) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    if (lower(trim(std::string_view(line).substr(0, colon))) == "content-length") {
      try {
        length = std::stoul(std::string(trim(std::string_view(line).substr(colon + 1))));
      } catch (const std::exception&) {
        length = 0;
      }
    }
  }
  while (buffer.size() < head_end + 4 + length)
    if (!fill()) return false;
  body = buffer.substr(head_end + 4, length);
  buffer.erase(0, head_end + 4 + length);
  return true;
}

std::vector<std::string> head_lines(const std::string& head) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    auto end = head.find("\r\n", start);
    lines.push_back(head.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 2;
  }
  return lines;
}

}  // namespace

std::string HttpRequest::header(std::string_view name) const { return find_header(headers, name); }
std::string HttpResponse::header(std::string_view name) const { return find_header(headers, name); }

Endpoint parse_base_url(const std::string& url) {
  std::string_view s = url;
  if (starts_with(s, "http://")) s.remove_prefix(7);
  if (auto slash = s.find('/'); slash != std::string_view::npos) s = s.substr(0, slash);
  Endpoint ep;
  auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("base URL needs host:port: " + url);
  ep.host = std::string(s.substr(0, colon));
  if (ep.host == "localhost") ep.host = "127.0.0.1";
  try {
    ep.port = std::stoi(std::string(s.substr(colon + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in base URL: " + url);
  }
  if (ep.host.empty() || ep.port <= 0 || ep.port > 65535) throw std::invalid_argument("bad base URL: " + url);
  return ep;
}

std::string reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 201: return "Created";
    case 204: return "No Content";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 409: return "Conflict";
    case 422: return "Unprocessable Entity";
    case 500: return "Internal Server Error";
    default: return "Status";
  }
}

HttpConnection::~HttpConnection() { close(); }

void HttpConnection::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  buffer_.clear();
}

bool HttpConnection::connect(const Endpoint& ep, int timeout_ms) {
  close();
  ep_ = ep;
  timeout_ms_ = timeout_ms;
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) {
    error_ = std::strerror(errno);
    return false;
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(ep.port));
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    error_ = "bad host " + ep.host;
    close();
    return false;
  }
  int flags = ::fcntl(fd_, F_GETFL, 0);
  ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (rc < 0 && errno == EINPROGRESS) {
    if (!wait_fd(fd_, POLLOUT, timeout_ms)) {
      error_ = "connect timeout";
      close();
      return false;
    }
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd_, SOL_SOCKET, SO_ERROR, &err, &len);
    rc = err == 0 ? 0 : -1;
    errno = err;
  }
  if (rc < 0) {
    error_ = std::string("connect: ") + std::strerror(errno);
    close();
    return false;
  }
  ::fcntl(fd_, F_SETFL, flags);
  return true;
}

bool HttpConnection::write_all(const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    if (!wait_fd(fd_, POLLOUT, timeout_ms_)) {
      error_ = "write timeout";
      return false;
    }
    auto n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) {
      error_ = "write failed";
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<HttpResponse> HttpConnection::read_response() {
  std::string head, body;
  if (!read_message(fd_, buffer_, timeout_ms_, head, body)) {
    error_ = "no response (timeout or connection closed)";
    return std::nullopt;
  }
  auto lines = head_lines(head);
  auto parts = split(lines.front(), ' ');
  HttpResponse r;
  if (parts.size() < 2) {
    error_ = "malformed status line";
    return std::nullopt;
  }
  try {
    r.status = std::stoi(parts[1]);
  } catch (const std::exception&) {
    error_ = "malformed status line";
    return std::nullopt;
  }
  auto reason_at = lines.front().find(' ', lines.front().find(' ') + 1);
  if (reason_at != std::string::npos) r.reason = lines.front().substr(reason_at + 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto colon = lines[i].find(':');
    if (colon == std::string::npos) continue;
    r.headers.emplace_back(lines[i].substr(0, colon), std::string(trim(std::string_view(lines[i]).substr(colon + 1))));
  }
  r.body = std::move(body);
  return r;
}

std::optional<HttpResponse> HttpConnection::send_message(const std::string& message) {
  if (fd_ < 0) {
    error_ = "not connected";
    return std::nullopt;
  }
  std::string head, body;
  if (auto at = message.find("\r\n\r\n"); at != std::string::npos) {
    head = message.substr(0, at);
    body = message.substr(at + 4);
  } else {
    head = message;
  }
  std::string out = head + "\r\nHost: " + ep_.host + ":" + std::to_string(ep_.port) +
                    "\r\nContent-Length: " + std::to_string(body.size()) + "\r\n\r\n" + body;
  if (!write_all(out)) return std::nullopt;
  return read_response();
}

std::optional<HttpResponse> HttpConnection::send(const std::string& method, const std::string& target,
                                                 const std::string& body) {
  return send_message(method + " " + target + " HTTP/1.1\r\n\r\n" + body);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listen_fd_, 64) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + std::strerror(errno));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  thread_ = std::thread([this] { run(); });
  return port_;
}

void HttpServer::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
  listen_fd_ = -1;
}

void HttpServer::run() {
  while (running_) {
    if (!wait_fd(listen_fd_, POLLIN, 100)) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    serve_connection(fd);
    ::close(fd);
  }
}

void HttpServer::serve_connection(int fd) {
  std::string buffer, head, body;
  while (running_ && read_message(fd, buffer, 10000, head, body, &running_)) {
    auto lines = head_lines(head);
    HttpRequest req;
    HttpResponse resp;
    auto parts = split(lines.front(), ' ');
    bool ok = parts.size() == 3 && starts_with(parts[2], "HTTP/");
    if (ok) {
      req.method = parts[0];
      req.target = parts[1];
      req.body = body;
      for (std::size_t i = 1; i < lines.size() && ok; ++i) {
        auto colon = lines[i].find(':');
        if (colon == std::string::npos) {
          ok = false;
          break;
        }
        req.headers.emplace_back(lines[i].substr(0, colon),
                                 std::string(trim(std::string_view(lines[i]).substr(colon + 1))));
      }
    }
    req.malformed = !ok;
    resp = handler_(req);
    std::string out = "HTTP/1.1 " + std::to_string(resp.status) + " " +
                      (resp.reason.empty() ? reason_phrase(resp.status) : resp.reason) + "\r\n";
    bool has_type = false;
    for (const auto& [k, v] : resp.headers) {
      out += k + ": " + v + "\r\n";
      has_type |= lower(k) == "content-type";
    }
    if (!has_type) out += "Content-Type: application/json\r\n";
    out += "Content-Length: " + std::to_string(resp.body.size()) + "\r\n\r\n" + resp.body;
    std::size_t off = 0;
    while (off < out.size()) {
      auto n = ::send(fd, out.data() + off, out.size() - off, MSG_NOSIGNAL);
      if (n <= 0) return;
      off += static_cast<std::size_t>(n);
    }
  }
}

}  // namespace seqfuzz
