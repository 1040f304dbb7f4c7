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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace derschedule {

/// Root of every exception thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a domain invariant (duplicate ids, bad lengths, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Invalid user-supplied configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Text input could not be parsed. Carries a 1-based position.
class ParseError : public Error {
  public:
    ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          file_(std::move(file)), line_(line), column_(column) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

/// A peer sent something that breaks the message contract.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

/// Broker unreachable, connection lost, or payload over the frame cap.
class BrokerError : public Error {
  public:
    using Error::Error;
};

/// Not enough workers announced themselves before the startup deadline.
class StartupError : public Error {
  public:
    using Error::Error;
};

/// A chunk could not be evaluated within the retry budget.
class WorkerLossError : public Error {
  public:
    WorkerLossError(std::size_t chunk_index, const std::string& what)
        : Error("chunk " + std::to_string(chunk_index) + ": " + what), chunk_index_(chunk_index) {}

    std::size_t chunk_index() const noexcept { return chunk_index_; }

  private:
    std::size_t chunk_index_;
};

} // namespace derschedule
