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

#include "derschedule/distribution/tcp_broker.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "derschedule/error.hpp"
#include "derschedule/text.hpp"

namespace derschedule::dist {

namespace {

constexpr std::size_t prefix_size = 4;

bool read_exact(int fd, char* buf, std::size_t n) {
    while (n > 0) {
        const ssize_t r = ::recv(fd, buf, n, 0);
        if (r == 0) return false;
        if (r < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        buf += r;
        n -= static_cast<std::size_t>(r);
    }
    return true;
}

bool write_all(int fd, const char* buf, std::size_t n) {
    while (n > 0) {
        const ssize_t w = ::send(fd, buf, n, MSG_NOSIGNAL);
        if (w < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        buf += w;
        n -= static_cast<std::size_t>(w);
    }
    return true;
}

enum class ReadStatus { ok, closed, oversized };

ReadStatus read_frame(int fd, std::size_t cap, std::string& body) {
    unsigned char prefix[prefix_size];
    if (!read_exact(fd, reinterpret_cast<char*>(prefix), prefix_size)) return ReadStatus::closed;
    const std::uint32_t len = (std::uint32_t{prefix[0]} << 24) | (std::uint32_t{prefix[1]} << 16) |
                              (std::uint32_t{prefix[2]} << 8) | std::uint32_t{prefix[3]};
    if (len > cap) return ReadStatus::oversized;
    body.resize(len);
    if (len > 0 && !read_exact(fd, body.data(), len)) return ReadStatus::closed;
    return ReadStatus::ok;
}

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) ::freeaddrinfo(head);
    }
};

void resolve(const Endpoint& ep, bool passive, AddrInfo& out) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    const std::string port = std::to_string(ep.port);
    const int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &out.head);
    if (rc != 0) throw BrokerError("cannot resolve " + ep.to_string() + ": " + ::gai_strerror(rc));
}

} // namespace

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

Endpoint parse_endpoint(std::string_view text) {
    Endpoint ep;
    std::string_view port_text = text;
    if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
        if (colon > 0) ep.host = std::string(text.substr(0, colon));
        port_text = text.substr(colon + 1);
    }
    const auto port = text::parse_integer(port_text);
    if (!port || *port < 0 || *port > 65535) {
        throw ConfigError("invalid broker address '" + std::string(text) + "' (expected host:port)");
    }
    ep.port = static_cast<std::uint16_t>(*port);
    return ep;
}

std::string encode_frame(const Frame& frame) {
    std::string body;
    body.reserve(frame.verb.size() + frame.topic.size() + frame.payload.size() + 2);
    body.append(frame.verb).append(1, ' ').append(frame.topic).append(1, '\n').append(frame.payload);
    if (body.size() > 0xFFFFFFFFu) throw BrokerError("frame too large");
    const auto len = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(prefix_size + body.size());
    out.push_back(static_cast<char>((len >> 24) & 0xFF));
    out.push_back(static_cast<char>((len >> 16) & 0xFF));
    out.push_back(static_cast<char>((len >> 8) & 0xFF));
    out.push_back(static_cast<char>(len & 0xFF));
    out.append(body);
    return out;
}

Frame decode_frame_body(std::string_view body) {
    const auto space = body.find(' ');
    const auto lf = body.find('\n');
    if (space == std::string_view::npos || lf == std::string_view::npos || space > lf) {
        throw ProtocolError("malformed frame header");
    }
    Frame f;
    f.verb = std::string(body.substr(0, space));
    f.topic = std::string(body.substr(space + 1, lf - space - 1));
    f.payload = std::string(body.substr(lf + 1));
    return f;
}

// ---------------------------------------------------------------------------
// Server

struct TcpBrokerServer::Connection {
    explicit Connection(int f) : fd(f) {}
    ~Connection() {
        if (fd >= 0) ::close(fd);
    }

    bool send(const std::string& bytes) {
        std::lock_guard lock(write_mutex);
        return write_all(fd, bytes.data(), bytes.size());
    }

    int fd;
    std::mutex write_mutex;
    std::map<std::string, std::size_t> patterns; // guarded by the server mutex
    std::thread thread;
    std::atomic<bool> done{false};
};

TcpBrokerServer::TcpBrokerServer(Endpoint bind, std::size_t frame_cap) : frame_cap_(frame_cap) {
    AddrInfo ai;
    resolve(bind, true, ai);
    std::string last_error = "no usable address";
    for (auto* p = ai.head; p; p = p->ai_next) {
        const int fd = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, p->ai_addr, p->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_error = errno_text();
        ::close(fd);
    }
    if (listen_fd_ < 0) throw BrokerError("cannot bind " + bind.to_string() + ": " + last_error);

    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    endpoint_.host = bind.host;
    endpoint_.port = addr.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port)
                                                : ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

TcpBrokerServer::~TcpBrokerServer() { stop(); }

std::size_t TcpBrokerServer::connection_count() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& c : connections_) n += c->done ? 0 : 1;
    return n;
}

void TcpBrokerServer::stop() {
    if (stopping_.exchange(true)) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    ::close(listen_fd_);
    std::vector<std::shared_ptr<Connection>> conns;
    {
        std::lock_guard lock(mutex_);
        conns.swap(connections_);
    }
    for (auto& c : conns) ::shutdown(c->fd, SHUT_RDWR);
    for (auto& c : conns) {
        if (c->thread.joinable()) c->thread.join();
    }
}

void TcpBrokerServer::accept_loop() {
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, 100);
        reap_finished();
        if (rc <= 0) continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        set_nodelay(fd);
        auto conn = std::make_shared<Connection>(fd);
        std::lock_guard lock(mutex_);
        if (stopping_) break; // conn closes its fd on destruction
        connections_.push_back(conn);
        conn->thread = std::thread([this, conn] { serve(conn); });
    }
}

void TcpBrokerServer::reap_finished() {
    std::vector<std::shared_ptr<Connection>> finished;
    {
        std::lock_guard lock(mutex_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            if ((*it)->done) {
                finished.push_back(*it);
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : finished) {
        if (c->thread.joinable()) c->thread.join();
    }
}

void TcpBrokerServer::serve(const std::shared_ptr<Connection>& conn) {
    std::string body;
    while (!stopping_) {
        if (read_frame(conn->fd, frame_cap_, body) != ReadStatus::ok) break;
        Frame f;
        try {
            f = decode_frame_body(body);
        } catch (const ProtocolError&) {
            break;
        }
        if (f.verb == "PUB") {
            if (f.topic.empty() || f.topic.find_first_of("+#") != std::string::npos) break;
            route(f.topic, f.payload);
        } else if (f.verb == "SUB") {
            try {
                validate_pattern(f.topic);
            } catch (const BrokerError&) {
                break;
            }
            {
                std::lock_guard lock(mutex_);
                ++conn->patterns[f.topic];
            }
            if (!conn->send(encode_frame({"SUBACK", f.topic, {}}))) break;
        } else if (f.verb == "UNSUB") {
            std::lock_guard lock(mutex_);
            if (auto it = conn->patterns.find(f.topic); it != conn->patterns.end() && --it->second == 0) {
                conn->patterns.erase(it);
            }
        } else {
            break;
        }
    }
    {
        std::lock_guard lock(mutex_);
        conn->patterns.clear();
    }
    ::shutdown(conn->fd, SHUT_RDWR);
    conn->done = true;
}

void TcpBrokerServer::route(const std::string& topic, const std::string& payload) {
    std::vector<std::shared_ptr<Connection>> targets;
    {
        std::lock_guard lock(mutex_);
        for (const auto& c : connections_) {
            if (c->done) continue;
            for (const auto& [pattern, refs] : c->patterns) {
                if (topic_matches(pattern, topic)) {
                    targets.push_back(c);
                    break;
                }
            }
        }
    }
    if (targets.empty()) return;
    const std::string frame = encode_frame({"MSG", topic, payload});
    for (const auto& c : targets) {
        if (!c->send(frame)) ::shutdown(c->fd, SHUT_RDWR);
    }
}

// ---------------------------------------------------------------------------
// Client

TcpBrokerClient::TcpBrokerClient(const Endpoint& endpoint, std::chrono::milliseconds connect_timeout,
                                 std::size_t frame_cap)
    : frame_cap_(frame_cap) {
    const auto deadline = std::chrono::steady_clock::now() + connect_timeout;
    std::string last_error;
    while (true) {
        AddrInfo ai;
        resolve(endpoint, false, ai);
        for (auto* p = ai.head; p && fd_ < 0; p = p->ai_next) {
            const int fd = ::socket(p->ai_family, p->ai_socktype | SOCK_CLOEXEC, p->ai_protocol);
            if (fd < 0) continue;
            if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) {
                fd_ = fd;
            } else {
                last_error = errno_text();
                ::close(fd);
            }
        }
        if (fd_ >= 0) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            throw BrokerError("broker unreachable at " + endpoint.to_string() + ": " + last_error);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    set_nodelay(fd_);
    reader_ = std::thread([this] { read_loop(); });
}

TcpBrokerClient::~TcpBrokerClient() {
    ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
}

void TcpBrokerClient::send(const Frame& frame) {
    const std::size_t body = frame.verb.size() + frame.topic.size() + frame.payload.size() + 2;
    if (body > frame_cap_) {
        throw BrokerError("frame of " + std::to_string(body) + " bytes exceeds the cap of " +
                          std::to_string(frame_cap_));
    }
    if (lost_) throw BrokerError("broker connection lost: " + lost_reason_);
    const std::string bytes = encode_frame(frame);
    std::lock_guard lock(write_mutex_);
    if (!write_all(fd_, bytes.data(), bytes.size())) {
        ::shutdown(fd_, SHUT_RDWR);
        throw BrokerError("broker connection lost: " + errno_text());
    }
}

void TcpBrokerClient::publish(std::string_view topic, std::string payload) {
    validate_topic(topic);
    send({"PUB", std::string(topic), std::move(payload)});
}

std::shared_ptr<Subscription> TcpBrokerClient::subscribe(std::string pattern) {
    validate_pattern(pattern);
    auto sub = std::make_shared<Subscription>(pattern);
    std::size_t ticket = 0;
    {
        std::lock_guard lock(subs_mutex_);
        subscriptions_.push_back(sub);
        ++pattern_refs_[pattern];
        ticket = ++acks_requested_;
    }
    send({"SUB", pattern, {}});
    std::unique_lock lock(subs_mutex_);
    const bool acked =
        ack_cv_.wait_for(lock, std::chrono::seconds(10), [&] { return acks_received_ >= ticket || lost_; });
    if (lost_) throw BrokerError("broker connection lost: " + lost_reason_);
    if (!acked) throw BrokerError("broker did not acknowledge subscription '" + pattern + "'");
    return sub;
}

void TcpBrokerClient::unsubscribe(const std::shared_ptr<Subscription>& subscription) {
    bool last = false;
    {
        std::lock_guard lock(subs_mutex_);
        const auto before = subscriptions_.size();
        std::erase(subscriptions_, subscription);
        if (subscriptions_.size() != before) {
            auto it = pattern_refs_.find(subscription->pattern());
            if (it != pattern_refs_.end() && --it->second == 0) {
                pattern_refs_.erase(it);
                last = true;
            }
        }
    }
    subscription->close("unsubscribed");
    if (last && !lost_) {
        try {
            send({"UNSUB", subscription->pattern(), {}});
        } catch (const BrokerError&) {
        }
    }
}

void TcpBrokerClient::fail(const std::string& reason) {
    std::vector<std::shared_ptr<Subscription>> subs;
    {
        std::lock_guard lock(subs_mutex_);
        lost_reason_ = reason;
        lost_ = true;
        subs = subscriptions_;
    }
    ack_cv_.notify_all();
    for (auto& s : subs) s->close(reason);
}

void TcpBrokerClient::read_loop() {
    std::string body;
    while (true) {
        const auto status = read_frame(fd_, frame_cap_, body);
        if (status == ReadStatus::closed) return fail("connection closed");
        if (status == ReadStatus::oversized) return fail("oversized frame from broker");
        Frame f;
        try {
            f = decode_frame_body(body);
        } catch (const ProtocolError& e) {
            return fail(e.what());
        }
        if (f.verb == "SUBACK") {
            {
                std::lock_guard lock(subs_mutex_);
                ++acks_received_;
            }
            ack_cv_.notify_all();
        } else if (f.verb == "MSG") {
            std::lock_guard lock(subs_mutex_);
            for (const auto& s : subscriptions_) {
                if (topic_matches(s->pattern(), f.topic)) s->deliver(Message{f.topic, f.payload});
            }
        } else {
            return fail("unexpected frame '" + f.verb + "' from broker");
        }
    }
}

} // namespace derschedule::dist
