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

/// @file tcp_broker.hpp
/// @brief Broker over TCP with 4-byte big-endian length-prefixed frames.
///
/// A frame body is `VERB SP topic LF payload`. Client to server: `SUB`, `UNSUB`,
/// `PUB`. Server to client: `MSG` (a delivery) and `SUBACK` (the subscription
/// named in the topic field is active). See docs/protocol.md.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "derschedule/distribution/broker.hpp"

namespace derschedule::dist {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    std::string to_string() const;
    bool operator==(const Endpoint&) const = default;
};

/// Accepts "host:port", ":port" and "port". Throws ConfigError.
Endpoint parse_endpoint(std::string_view text);

struct Frame {
    std::string verb;
    std::string topic;
    std::string payload;

    bool operator==(const Frame&) const = default;
};

/// Length prefix plus body.
std::string encode_frame(const Frame& frame);

/// Parses a frame body (without the length prefix). Throws ProtocolError.
Frame decode_frame_body(std::string_view body);

class TcpBrokerServer {
  public:
    /// Binds and starts accepting. Port 0 picks a free port. Throws BrokerError
    /// when the address cannot be bound.
    explicit TcpBrokerServer(Endpoint bind = {}, std::size_t frame_cap = default_frame_cap);
    ~TcpBrokerServer();

    TcpBrokerServer(const TcpBrokerServer&) = delete;
    TcpBrokerServer& operator=(const TcpBrokerServer&) = delete;

    /// The bound address, with the actual port.
    Endpoint endpoint() const { return endpoint_; }

    std::size_t connection_count() const;

    /// Closes the listener and every connection. Idempotent.
    void stop();

  private:
    struct Connection;

    void accept_loop();
    void serve(const std::shared_ptr<Connection>& conn);
    void route(const std::string& topic, const std::string& payload);
    void reap_finished();

    Endpoint endpoint_;
    std::size_t frame_cap_;
    int listen_fd_ = -1;
    std::atomic<bool> stopping_{false};
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<Connection>> connections_;
    std::thread accept_thread_;
};

class TcpBrokerClient final : public Broker {
  public:
    /// Retries the connection until `connect_timeout` expires, then throws
    /// BrokerError.
    explicit TcpBrokerClient(const Endpoint& endpoint,
                             std::chrono::milliseconds connect_timeout = std::chrono::seconds(5),
                             std::size_t frame_cap = default_frame_cap);
    ~TcpBrokerClient() override;

    TcpBrokerClient(const TcpBrokerClient&) = delete;
    TcpBrokerClient& operator=(const TcpBrokerClient&) = delete;

    void publish(std::string_view topic, std::string payload) override;

    /// Returns once the server has acknowledged the subscription.
    std::shared_ptr<Subscription> subscribe(std::string pattern) override;
    void unsubscribe(const std::shared_ptr<Subscription>& subscription) override;

    bool connected() const noexcept { return !lost_.load(); }

  private:
    void send(const Frame& frame);
    void read_loop();
    void fail(const std::string& reason);

    int fd_ = -1;
    std::size_t frame_cap_;
    std::atomic<bool> lost_{false};
    std::mutex write_mutex_;

    std::mutex subs_mutex_;
    std::condition_variable ack_cv_;
    std::vector<std::shared_ptr<Subscription>> subscriptions_;
    std::map<std::string, std::size_t> pattern_refs_;
    std::size_t acks_requested_ = 0;
    std::size_t acks_received_ = 0;
    std::string lost_reason_;

    std::thread reader_;
};

} // namespace derschedule::dist
