// Copyright 2026 The coheval Authors.
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

#include "coheval/bridge.h"

#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "coheval/error.h"
#include "json.hpp"

namespace coheval {
namespace {

using json = nlohmann::json;

// Buffered line reader/writer over a pair of file descriptors.
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}

  void write_line(std::string_view line) override {
    std::string buf(line);
    buf.push_back('\n');
    std::size_t off = 0;
    while (off < buf.size()) {
      const ssize_t n = send_bytes(buf.data() + off, buf.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BridgeError(std::string("bridge write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> read_line() override {
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (eof_) {
        if (buffer_.empty()) return std::nullopt;
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw BridgeError(std::string("bridge read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        eof_ = true;
      } else {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      }
    }
  }

 protected:
  virtual ssize_t send_bytes(const char* data, std::size_t size) {
    return ::write(write_fd_, data, size);
  }

  int read_fd_;
  int write_fd_;

 private:
  std::string buffer_;
  bool eof_ = false;
};

class SubprocessChannel : public FdChannel {
 public:
  SubprocessChannel(int read_fd, int write_fd, pid_t pid)
      : FdChannel(read_fd, write_fd), pid_(pid) {}

  ~SubprocessChannel() override {
    ::close(write_fd_);
    ::close(read_fd_);
    int status;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
  }

 private:
  pid_t pid_;
};

class SocketChannel : public FdChannel {
 public:
  explicit SocketChannel(int fd) : FdChannel(fd, fd) {}
  ~SocketChannel() override { ::close(read_fd_); }

 protected:
  ssize_t send_bytes(const char* data, std::size_t size) override {
    return ::send(write_fd_, data, size, MSG_NOSIGNAL);
  }
};

std::unique_ptr<LineChannel> spawn(const std::string& command) {
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) throw BridgeError("pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw BridgeError("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw BridgeError("fork failed");
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  // A bridge that exits early must surface as a write error, not a signal.
  ::signal(SIGPIPE, SIG_IGN);
  return std::make_unique<SubprocessChannel>(from_child[0], to_child[1], pid);
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& host, const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
    throw BridgeError("cannot resolve " + host + ":" + port + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw BridgeError("cannot connect to " + host + ":" + port);
  return std::make_unique<SocketChannel>(fd);
}

}  // namespace

std::unique_ptr<LineChannel> open_channel(std::string_view endpoint) {
  if (endpoint.starts_with("exec:")) {
    const std::string command(endpoint.substr(5));
    if (command.empty()) throw BridgeError("empty bridge command");
    return spawn(command);
  }
  if (endpoint.starts_with("tcp:")) {
    const auto rest = endpoint.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
      throw BridgeError("expected tcp:<host>:<port>, got " + std::string(endpoint));
    }
    return connect_tcp(std::string(rest.substr(0, colon)),
                       std::string(rest.substr(colon + 1)));
  }
  throw BridgeError("unsupported bridge endpoint '" + std::string(endpoint) +
                    "' (use exec:<command> or tcp:<host>:<port>)");
}

SentenceEmbeddingStore embed_texts_via_bridge(std::span<const KeyedText> texts,
                                              LineChannel& channel,
                                              std::string store_name) {
  SentenceEmbeddingStore store(std::move(store_name));
  for (const auto& item : texts) {
    json req;
    req["op"] = "embed";
    req["key"] = item.key;
    req["text"] = item.text;
    channel.write_line(req.dump());

    const auto line = channel.read_line();
    if (!line) throw BridgeError("missing key " + item.key + ": bridge closed the stream");
    json resp;
    try {
      resp = json::parse(*line);
    } catch (const json::parse_error&) {
      throw BridgeError("malformed bridge response for key " + item.key);
    }
    if (!resp.is_object()) throw BridgeError("malformed bridge response for key " + item.key);
    if (auto err = resp.find("error"); err != resp.end()) {
      throw BridgeError("bridge error for key " + item.key + ": " + err->dump());
    }
    auto key = resp.find("key");
    if (key == resp.end() || !key->is_string() || key->get<std::string>() != item.key) {
      throw BridgeError("missing key " + item.key + " in bridge response");
    }
    auto vec = resp.find("vector");
    if (vec == resp.end() || !vec->is_array()) {
      throw BridgeError("malformed bridge response for key " + item.key);
    }
    std::vector<double> v;
    v.reserve(vec->size());
    for (const auto& x : *vec) {
      if (!x.is_number()) throw BridgeError("non-numeric vector for key " + item.key);
      v.push_back(x.get<double>());
    }
    try {
      store.add(item.key, std::move(v));
    } catch (const Error& e) {
      throw BridgeError(e.what());
    }
  }
  try {
    channel.write_line(R"({"op":"end"})");
  } catch (const BridgeError&) {
    // All answers are in; a bridge that already exited is fine.
  }
  return store;
}

SentenceEmbeddingStore embed_texts_via_bridge(std::span<const KeyedText> texts,
                                              std::string_view endpoint,
                                              std::string store_name) {
  auto channel = open_channel(endpoint);
  return embed_texts_via_bridge(texts, *channel, std::move(store_name));
}

}  // namespace coheval
