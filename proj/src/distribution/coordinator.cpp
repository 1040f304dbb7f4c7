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

#include "derschedule/distribution/coordinator.hpp"

#include <algorithm>
#include <set>
#include <variant>

#include "derschedule/distribution/chunking.hpp"
#include "derschedule/distribution/protocol.hpp"
#include "derschedule/error.hpp"
#include "derschedule/output.hpp"

namespace derschedule::dist {

namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds until(Clock::time_point t) {
    const auto d = std::chrono::ceil<std::chrono::milliseconds>(t - Clock::now());
    return std::max(d, std::chrono::milliseconds::zero());
}

struct PendingChunk {
    ChunkEnvelope envelope;
    Clock::time_point deadline;
    bool done = false;
};

bool aligned(const ResultEnvelope& r, const ChunkEnvelope& c) {
    if (r.results.size() != c.items.size()) return false;
    for (std::size_t i = 0; i < c.items.size(); ++i) {
        if (r.results[i].seq != c.items[i].seq) return false;
    }
    return true;
}

} // namespace

DistributedBackend::DistributedBackend(Broker& broker, DistributionOptions options)
    : broker_(broker), options_(std::move(options)) {
    if (options_.task_id.empty()) throw ConfigError("task id must not be empty");
    if (options_.task_id.find_first_of("/+#") != std::string::npos) {
        throw ConfigError("task id must not contain '/', '+' or '#'");
    }
    if (options_.worker_count == 0) throw ConfigError("worker count must be at least 1");
    results_ = broker_.subscribe(topics::results(options_.task_id));
    ready_ = broker_.subscribe(std::string(topics::workers_ready));
}

DistributedBackend::~DistributedBackend() {
    try {
        broker_.unsubscribe(results_);
        if (ready_) broker_.unsubscribe(ready_);
    } catch (const std::exception&) {
    }
}

const std::vector<std::string>& DistributedBackend::await_workers() {
    if (ready_done_) return roster_;
    const auto control = topics::control(options_.task_id);
    const auto roll_call = encode(ControlMessage{options_.task_id, ControlMessage::Kind::roll_call});
    const auto deadline = Clock::now() + options_.startup_timeout;
    auto next_roll_call = Clock::now();
    std::set<std::string> rejected;

    while (roster_.size() < options_.worker_count) {
        const auto now = Clock::now();
        if (now >= next_roll_call) {
            broker_.publish(control, roll_call);
            next_roll_call = now + options_.roll_call_interval;
        }
        if (now >= deadline) {
            std::string msg = std::to_string(roster_.size()) + " of " + std::to_string(options_.worker_count) +
                              " workers ready after " + std::to_string(options_.startup_timeout.count()) + " ms";
            if (!rejected.empty()) msg += " (" + std::to_string(rejected.size()) + " rejected for scenario mismatch)";
            throw StartupError(msg);
        }
        auto m = ready_->next(until(std::min(deadline, next_roll_call)));
        if (!m) continue;
        ReadyMessage ready;
        try {
            ready = decode_ready(m->payload);
        } catch (const ProtocolError&) {
            continue;
        }
        if (ready.task_id != options_.task_id) continue;
        if (options_.scenario_fingerprint && ready.fingerprint != *options_.scenario_fingerprint) {
            if (rejected.insert(ready.worker_id).second) ++stats_.rejected_workers;
            continue;
        }
        if (std::find(roster_.begin(), roster_.end(), ready.worker_id) == roster_.end()) {
            roster_.push_back(ready.worker_id);
        }
    }
    std::sort(roster_.begin(), roster_.end());
    broker_.unsubscribe(ready_);
    ready_.reset();
    ready_done_ = true;
    return roster_;
}

std::vector<EvaluationResult> DistributedBackend::evaluate(std::span<const Chromosome> batch,
                                                           std::size_t batch_index) {
    if (!ready_done_) throw StartupError("no chunk may be sent before the workers are ready");
    if (terminated_) throw Error("task already terminated");
    if (roster_.empty()) throw WorkerLossError(0, "no surviving workers");
    if (batch.empty()) return {};
    ++stats_.batches;

    std::vector<PendingChunk> pending;
    for (auto& c : split(batch, roster_.size(), options_.task_id, batch_index)) {
        pending.push_back({std::move(c), {}, false});
    }

    auto send = [&](PendingChunk& p, const std::string& worker) {
        p.envelope.worker_id = worker;
        p.deadline = Clock::now() + options_.chunk_timeout;
        broker_.publish(topics::chunks(options_.task_id, worker), encode(p.envelope));
        ++stats_.chunks_sent;
    };

    enum class Cause { timeout, nak, failure, misaligned };
    auto resend = [&](PendingChunk& p, Cause cause, const std::string& reason) {
        const std::size_t index = p.envelope.chunk_index;
        if (p.envelope.attempt >= options_.max_retries) {
            const std::string what = "gave up after " + std::to_string(p.envelope.attempt + 1) + " attempts: " + reason;
            if (cause == Cause::timeout) throw WorkerLossError(index, what);
            if (cause == Cause::failure) throw Error("chunk " + std::to_string(index) + ": " + what);
            throw ProtocolError("chunk " + std::to_string(index) + ": " + what);
        }
        if (roster_.empty()) throw WorkerLossError(index, "no surviving workers");
        std::size_t next = (index + p.envelope.attempt + 1) % roster_.size();
        if (const auto it = std::find(roster_.begin(), roster_.end(), p.envelope.worker_id); it != roster_.end()) {
            next = (static_cast<std::size_t>(it - roster_.begin()) + 1) % roster_.size();
        }
        ++p.envelope.attempt;
        ++stats_.retries;
        send(p, roster_[next]);
    };

    for (std::size_t i = 0; i < pending.size(); ++i) send(pending[i], roster_[i % roster_.size()]);

    std::vector<ResultEnvelope> collected;
    collected.reserve(pending.size());
    std::size_t remaining = pending.size();

    while (remaining > 0) {
        Clock::time_point earliest = Clock::time_point::max();
        for (const auto& p : pending) {
            if (!p.done) earliest = std::min(earliest, p.deadline);
        }
        if (Clock::now() >= earliest) {
            for (auto& p : pending) {
                if (p.done || Clock::now() < p.deadline) continue;
                const auto it = std::find(roster_.begin(), roster_.end(), p.envelope.worker_id);
                if (it != roster_.end()) {
                    roster_.erase(it);
                    ++stats_.workers_lost;
                }
                resend(p, Cause::timeout, "worker '" + p.envelope.worker_id + "' did not answer");
            }
            continue;
        }

        auto m = results_->next(until(earliest));
        if (!m) continue;
        std::variant<ResultEnvelope, RejectMessage> reply;
        try {
            reply = decode_worker_reply(m->payload);
        } catch (const ProtocolError&) {
            ++stats_.discarded_replies;
            continue;
        }

        if (auto* r = std::get_if<ResultEnvelope>(&reply)) {
            if (r->task_id != options_.task_id || r->generation != batch_index || r->chunk_index >= pending.size() ||
                pending[r->chunk_index].done) {
                ++stats_.discarded_replies;
                continue;
            }
            auto& p = pending[r->chunk_index];
            if (!aligned(*r, p.envelope)) {
                resend(p, Cause::misaligned, "result not aligned with the chunk");
                continue;
            }
            p.done = true;
            --remaining;
            collected.push_back(std::move(*r));
        } else {
            auto& rej = std::get<RejectMessage>(reply);
            if (rej.task_id != options_.task_id || rej.generation != batch_index ||
                rej.chunk_index >= pending.size() || pending[rej.chunk_index].done ||
                pending[rej.chunk_index].envelope.worker_id != rej.worker_id) {
                ++stats_.discarded_replies;
                continue;
            }
            const bool nak = rej.kind == RejectMessage::Kind::nak;
            nak ? ++stats_.naks : ++stats_.failures;
            resend(pending[rej.chunk_index], nak ? Cause::nak : Cause::failure,
                   "worker '" + rej.worker_id + "': " + rej.reason);
        }
    }
    return join(collected, pending.size(), batch.size());
}

void DistributedBackend::terminate() {
    if (terminated_) return;
    terminated_ = true;
    broker_.publish(topics::control(options_.task_id),
                    encode(ControlMessage{options_.task_id, ControlMessage::Kind::terminate}));
}

JobResult coordinate(const TaskDescriptor& task, Broker& broker, const ScenarioBundle& scenario,
                     const CoordinateOptions& options) {
    if (!task.scenario.empty() && task.scenario != scenario.name()) {
        throw ConfigError("task refers to scenario '" + task.scenario + "' but '" + scenario.name() + "' was given");
    }
    const EaConfig config = resolve_config(task.ea, scenario.fleet());
    validate_config(config);

    DistributionOptions d;
    d.task_id = task.task_id;
    d.worker_count = task.worker_count;
    d.startup_timeout = options.startup_timeout;
    d.chunk_timeout = options.chunk_timeout;
    d.max_retries = options.max_retries;
    d.scenario_fingerprint = fingerprint(scenario);
    DistributedBackend backend(broker, d);

    struct TerminateGuard {
        DistributedBackend& b;
        ~TerminateGuard() {
            try {
                b.terminate();
            } catch (const std::exception&) {
            }
        }
    } guard{backend};

    const auto start = Clock::now();
    backend.await_workers();
    JobResult out;
    out.run = run(config, scenario.fleet(), backend, options.run);
    backend.terminate();
    out.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    out.stats = backend.stats();
    out.workers = backend.roster();

    if (options.out_dir) {
        write_run_outputs(*options.out_dir, scenario, out.run, config,
                          RunSummary{scenario.name(), "distributed", task.worker_count, out.wall_time_s},
                          options.gnuplot);
    }
    return out;
}

} // namespace derschedule::dist
