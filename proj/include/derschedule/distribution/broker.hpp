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

/// @file broker.hpp
/// @brief Topic-based publish/subscribe.
///
/// Topics are '/'-separated levels. Subscription patterns may use `+` for one
/// level and a trailing `#` for any number of remaining levels. Messages are
/// not retained: a subscriber only sees what is published after it subscribed.
/// Delivery from one publisher on one topic is FIFO.

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace derschedule::dist {

inline constexpr std::size_t default_frame_cap = std::size_t{64} << 20;

struct Message {
    std::string topic;
    std::string payload;
};

bool topic_matches(std::string_view pattern, std::string_view topic);

/// Throws BrokerError on an empty topic or one containing wildcards.
void validate_topic(std::string_view topic);

/// Throws BrokerError on an empty pattern or a misplaced wildcard.
void validate_pattern(std::string_view pattern);

/// Queue of messages for one pattern. Filled by a broker, drained by the owner.
class Subscription {
  public:
    explicit Subscription(std::string pattern) : pattern_(std::move(pattern)) {}

    const std::string& pattern() const noexcept { return pattern_; }

    /// Blocks up to `timeout`; nullopt on timeout. Throws BrokerError once the
    /// subscription is closed and drained.
    std::optional<Message> next(std::chrono::milliseconds timeout);

    std::optional<Message> try_next() { return next(std::chrono::milliseconds::zero()); }

    void deliver(Message message);

    /// Wakes waiters; later `next` calls throw after the queue drains.
    void close(std::string reason);

    bool closed() const;

  private:
    std::string pattern_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Message> queue_;
    bool closed_ = false;
    std::string close_reason_;
};

class Broker {
  public:
    virtual ~Broker() = default;

    virtual void publish(std::string_view topic, std::string payload) = 0;
    virtual std::shared_ptr<Subscription> subscribe(std::string pattern) = 0;
    virtual void unsubscribe(const std::shared_ptr<Subscription>& subscription) = 0;
};

/// Broker for threads of one process.
class InProcessBroker final : public Broker {
  public:
    explicit InProcessBroker(std::size_t max_payload = default_frame_cap) : max_payload_(max_payload) {}

    void publish(std::string_view topic, std::string payload) override;
    std::shared_ptr<Subscription> subscribe(std::string pattern) override;
    void unsubscribe(const std::shared_ptr<Subscription>& subscription) override;

  private:
    std::size_t max_payload_;
    std::mutex mutex_;
    std::vector<std::shared_ptr<Subscription>> subscriptions_;
};

} // namespace derschedule::dist
