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

#include "derschedule/distribution/worker.hpp"

#include <limits>

#include "derschedule/distribution/protocol.hpp"
#include "derschedule/error.hpp"
#include "derschedule/evaluation.hpp"

namespace derschedule::dist {

namespace {

class WorkerSession {
  public:
    WorkerSession(Broker& broker, const ScenarioBundle& scenario, const WorkerOptions& options, WorkerStats& stats)
        : broker_(broker), scenario_(scenario), options_(options), stats_(stats),
          evaluator_(scenario.fleet(), scenario.load(), scenario.fitness(), options.eval_delay),
          results_topic_(topics::results(options.task_id)) {}

    void announce() {
        broker_.publish(topics::workers_ready,
                        encode(ReadyMessage{options_.task_id, options_.worker_id, scenario_.name(),
                                            fingerprint(scenario_)}));
    }

    void handle_chunk(const std::string& payload) {
        if (options_.go_silent_after && stats_.chunks >= *options_.go_silent_after) return;
        ++stats_.chunks;

        ChunkEnvelope chunk;
        try {
            chunk = decode_chunk(payload, scenario_.grid());
        } catch (const ProtocolError& e) {
            const auto [task, index] = peek_chunk_address(payload);
            reject(RejectMessage::Kind::nak, task, 0, index, std::string("malformed chunk: ") + e.what());
            return;
        }
        if (chunk.task_id != options_.task_id) {
            reject(RejectMessage::Kind::nak, chunk.task_id, chunk.generation, chunk.chunk_index,
                   "unknown task '" + chunk.task_id + "'");
            return;
        }
        try {
            for (const auto& item : chunk.items) {
                validate_chromosome(item.chromosome, scenario_.fleet(), std::numeric_limits<std::size_t>::max());
            }
        } catch (const ValidationError& e) {
            reject(RejectMessage::Kind::nak, chunk.task_id, chunk.generation, chunk.chunk_index,
                   std::string("malformed chunk: ") + e.what());
            return;
        }

        ResultEnvelope out;
        out.task_id = chunk.task_id;
        out.generation = chunk.generation;
        out.chunk_index = chunk.chunk_index;
        out.worker_id = options_.worker_id;
        out.results.reserve(chunk.items.size());
        try {
            for (const auto& item : chunk.items) {
                out.results.push_back({item.seq, evaluator_(item.chromosome)});
                ++stats_.evaluations;
            }
        } catch (const std::exception& e) {
            reject(RejectMessage::Kind::failure, chunk.task_id, chunk.generation, chunk.chunk_index, e.what());
            return;
        }
        broker_.publish(results_topic_, encode(out));
    }

  private:
    void reject(RejectMessage::Kind kind, const std::string& task, std::size_t generation, std::size_t index,
                std::string reason) {
        kind == RejectMessage::Kind::nak ? ++stats_.naks : ++stats_.failures;
        // The reply goes to this worker's own task; a foreign task has no listener here.
        broker_.publish(results_topic_,
                        encode(RejectMessage{kind, task, generation, index, options_.worker_id, std::move(reason)}));
    }

    Broker& broker_;
    const ScenarioBundle& scenario_;
    const WorkerOptions& options_;
    WorkerStats& stats_;
    ChromosomeEvaluator evaluator_;
    std::string results_topic_;
};

} // namespace

WorkerExit run_worker(Broker& broker, const ScenarioBundle& scenario, const WorkerOptions& options,
                      const std::atomic<bool>& stop, WorkerStats* stats) {
    if (options.task_id.empty()) throw ConfigError("worker needs a task id");
    if (options.worker_id.empty()) throw ConfigError("worker needs a worker id");
    if (options.worker_id.find_first_of("/+#") != std::string::npos) {
        throw ConfigError("worker id must not contain '/', '+' or '#'");
    }

    WorkerStats local;
    WorkerStats& st = stats ? *stats : local;
    WorkerSession session(broker, scenario, options, st);

    try {
        auto chunks = broker.subscribe(topics::chunks(options.task_id, options.worker_id));
        auto control = broker.subscribe(topics::control(options.task_id));
        session.announce();

        while (!stop) {
            while (auto msg = control->try_next()) {
                ControlMessage c;
                try {
                    c = decode_control(msg->payload);
                } catch (const ProtocolError&) {
                    continue;
                }
                if (c.kind == ControlMessage::Kind::terminate) return WorkerExit::terminated;
                session.announce();
            }
            if (auto msg = chunks->next(options.poll_interval)) session.handle_chunk(msg->payload);
        }
        return WorkerExit::stopped;
    } catch (const BrokerError&) {
        if (stop) return WorkerExit::stopped;
        return WorkerExit::broker_lost;
    }
}

} // namespace derschedule::dist
