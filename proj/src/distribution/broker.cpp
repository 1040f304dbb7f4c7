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

#include "derschedule/distribution/broker.hpp"

#include <algorithm>

#include "derschedule/error.hpp"

namespace derschedule::dist {

namespace {

std::vector<std::string_view> levels(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = s.find('/', begin);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(begin));
            return out;
        }
        out.push_back(s.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

} // namespace

bool topic_matches(std::string_view pattern, std::string_view topic) {
    const auto p = levels(pattern);
    const auto t = levels(topic);
    std::size_t i = 0;
    for (; i < p.size(); ++i) {
        if (p[i] == "#") return true;
        if (i >= t.size()) return false;
        if (p[i] != "+" && p[i] != t[i]) return false;
    }
    return i == t.size();
}

void validate_topic(std::string_view topic) {
    if (topic.empty()) throw BrokerError("topic must not be empty");
    if (topic.find_first_of("+#") != std::string_view::npos) {
        throw BrokerError("topic '" + std::string(topic) + "' contains a wildcard");
    }
}

void validate_pattern(std::string_view pattern) {
    if (pattern.empty()) throw BrokerError("subscription pattern must not be empty");
    const auto p = levels(pattern);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool wild = p[i].find_first_of("+#") != std::string_view::npos;
        if (!wild) continue;
        const bool ok = p[i] == "+" || (p[i] == "#" && i + 1 == p.size());
        if (!ok) throw BrokerError("misplaced wildcard in pattern '" + std::string(pattern) + "'");
    }
}

std::optional<Message> Subscription::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
    if (!queue_.empty()) {
        Message m = std::move(queue_.front());
        queue_.pop_front();
        return m;
    }
    if (closed_) throw BrokerError("subscription '" + pattern_ + "' closed: " + close_reason_);
    return std::nullopt;
}

void Subscription::deliver(Message message) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        queue_.push_back(std::move(message));
    }
    cv_.notify_all();
}

void Subscription::close(std::string reason) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        closed_ = true;
        close_reason_ = std::move(reason);
    }
    cv_.notify_all();
}

bool Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

void InProcessBroker::publish(std::string_view topic, std::string payload) {
    validate_topic(topic);
    if (payload.size() > max_payload_) {
        throw BrokerError("payload of " + std::to_string(payload.size()) + " bytes exceeds the cap of " +
                          std::to_string(max_payload_));
    }
    std::lock_guard lock(mutex_);
    for (const auto& s : subscriptions_) {
        if (topic_matches(s->pattern(), topic)) s->deliver(Message{std::string(topic), payload});
    }
}

std::shared_ptr<Subscription> InProcessBroker::subscribe(std::string pattern) {
    validate_pattern(pattern);
    auto s = std::make_shared<Subscription>(std::move(pattern));
    std::lock_guard lock(mutex_);
    subscriptions_.push_back(s);
    return s;
}

void InProcessBroker::unsubscribe(const std::shared_ptr<Subscription>& subscription) {
    std::lock_guard lock(mutex_);
    std::erase(subscriptions_, subscription);
    subscription->close("unsubscribed");
}

} // namespace derschedule::dist
