// Copyright 2026 The kconflict Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <memory>

#include "httplib.h"
#include "kconflict/corpus.h"
#include "kconflict/log.h"
#include "kconflict/semantic_perturb.h"

namespace kconflict {

namespace {

std::optional<std::string> FilledFrom(const std::string& body) {
  try {
    const Json j = Json::parse(body);
    if (j.is_object() && j.contains("filled") && j["filled"].is_string()) {
      return j["filled"].get<std::string>();
    }
  } catch (const Json::exception&) {
  }
  return std::nullopt;
}

}  // namespace

SubprocessInfiller::SubprocessInfiller(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

SubprocessInfiller::~SubprocessInfiller() { Stop(); }

bool SubprocessInfiller::Start() {
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) return false;
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return false;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  setpgid(pid, pid);
  pid_ = pid;
  to_child_ = fds[0];
  from_child_ = fds[0];
  buffer_.clear();
  return true;
}

void SubprocessInfiller::Stop() {
  if (to_child_ >= 0) close(to_child_);
  to_child_ = -1;
  from_child_ = -1;
  if (pid_ > 0) {
    kill(-pid_, SIGTERM);
    kill(pid_, SIGTERM);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

std::optional<std::string> SubprocessInfiller::Fill(const std::string& text_with_blank) {
  if (pid_ < 0 && !Start()) {
    LogWarning("could not start infiller command: " + command_);
    return std::nullopt;
  }
  const std::string request = Json{{"text", text_with_blank}}.dump() + "\n";
  size_t sent = 0;
  while (sent < request.size()) {
    const ssize_t n =
        send(to_child_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      return std::nullopt;
    }
    sent += static_cast<size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  while (true) {
    const size_t newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      const std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return FilledFrom(line);
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      LogWarning("infiller timed out after " + std::to_string(timeout_ms_) + " ms");
      Stop();
      return std::nullopt;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    char chunk[4096];
    const ssize_t n = recv(from_child_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Stop();
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

HttpInfiller::HttpInfiller(std::string url, int timeout_ms)
    : url_(std::move(url)), timeout_ms_(timeout_ms) {}

std::optional<std::string> HttpInfiller::Fill(const std::string& text_with_blank) {
  const size_t scheme_end = url_.find("://");
  const size_t path_start =
      scheme_end == std::string::npos ? std::string::npos : url_.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);
  try {
    httplib::Client client(base);
    const time_t sec = timeout_ms_ / 1000;
    const time_t usec = (timeout_ms_ % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    const auto response =
        client.Post(path, Json{{"text", text_with_blank}}.dump(), "application/json");
    if (!response || response->status != 200) {
      LogWarning("infiller request to " + url_ + " failed");
      return std::nullopt;
    }
    return FilledFrom(response->body);
  } catch (const std::exception& e) {
    LogWarning("infiller request to " + url_ + " failed: " + e.what());
    return std::nullopt;
  }
}

std::unique_ptr<Infiller> MakeInfiller(const std::string& spec, int timeout_ms) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_unique<HttpInfiller>(spec, timeout_ms);
  }
  return std::make_unique<SubprocessInfiller>(spec, timeout_ms);
}

}  // namespace kconflict
