// Copyright 2026 The derschedule Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace derschedule {

/// Owned child process. Killed and reaped on destruction if still running.
class ChildProcess {
  public:
    ChildProcess() = default;
    ~ChildProcess();

    ChildProcess(ChildProcess&& other) noexcept;
    ChildProcess& operator=(ChildProcess&& other) noexcept;
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    /// Starts `executable` with `args` (argv[0] is added). Inherits stdio and
    /// the environment. Throws Error when the spawn fails.
    static ChildProcess spawn(const std::filesystem::path& executable, const std::vector<std::string>& args);

    pid_t pid() const noexcept { return pid_; }

    /// False once the child has been reaped.
    bool running();

    void signal(int sig);

    /// Exit code, or 128 + signal number for a signalled child.
    int wait();

    /// nullopt if the child is still running after `timeout`.
    std::optional<int> wait_for(std::chrono::milliseconds timeout);

    /// SIGTERM, then SIGKILL if the child outlives `grace`.
    int terminate(std::chrono::milliseconds grace = std::chrono::seconds(2));

  private:
    explicit ChildProcess(pid_t pid) : pid_(pid) {}
    bool reap(int options);

    pid_t pid_ = -1;
    std::optional<int> status_;
};

/// Path of the running executable.
std::filesystem::path current_executable();

} // namespace derschedule
