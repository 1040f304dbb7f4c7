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

/// @file protocol.hpp
/// @brief Message envelopes exchanged between master and workers.
///
/// Payloads are JSON objects carrying `"v": 1` and a `"type"` discriminator.
/// See docs/protocol.md for the schema and a byte-level example.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "derschedule/domain.hpp"

namespace derschedule::dist {

inline constexpr int protocol_version = 1;

namespace topics {

/// Chunks for one worker: task/{task_id}/chunks/{worker_id}.
std::string chunks(std::string_view task_id, std::string_view worker_id);
/// task/{task_id}/results
std::string results(std::string_view task_id);
/// task/{task_id}/control
std::string control(std::string_view task_id);
inline constexpr std::string_view workers_ready = "workers/ready";

} // namespace topics

struct SequencedChromosome {
    std::size_t seq = 0; ///< position in the original batch
    Chromosome chromosome;

    bool operator==(const SequencedChromosome&) const = default;
};

struct ChunkEnvelope {
    std::string task_id;
    std::size_t generation = 0;
    std::size_t chunk_index = 0;
    std::size_t total_chunks = 0;
    std::size_t attempt = 0;
    std::string worker_id;
    std::vector<SequencedChromosome> items;

    bool operator==(const ChunkEnvelope&) const = default;
};

struct SequencedResult {
    std::size_t seq = 0;
    EvaluationResult result;

    bool operator==(const SequencedResult&) const = default;
};

struct ResultEnvelope {
    std::string task_id;
    std::size_t generation = 0;
    std::size_t chunk_index = 0;
    std::string worker_id;
    std::vector<SequencedResult> results;

    bool operator==(const ResultEnvelope&) const = default;
};

/// A worker refusing (`nak`: malformed or foreign chunk) or failing
/// (`failure`: evaluation threw) a chunk.
struct RejectMessage {
    enum class Kind { nak, failure };
    Kind kind = Kind::nak;
    std::string task_id;
    std::size_t generation = 0;
    std::size_t chunk_index = 0;
    std::string worker_id;
    std::string reason;

    bool operator==(const RejectMessage&) const = default;
};

struct ReadyMessage {
    std::string task_id;
    std::string worker_id;
    std::string scenario;
    std::uint64_t fingerprint = 0;

    bool operator==(const ReadyMessage&) const = default;
};

struct ControlMessage {
    enum class Kind { roll_call, terminate };
    std::string task_id;
    Kind kind = Kind::terminate;

    bool operator==(const ControlMessage&) const = default;
};

std::string encode(const ChunkEnvelope& m);
std::string encode(const ResultEnvelope& m);
std::string encode(const RejectMessage& m);
std::string encode(const ReadyMessage& m);
std::string encode(const ControlMessage& m);

/// Genes are rebuilt through the Gene constructor against `grid`, so an
/// out-of-range gene is a ProtocolError rather than a corrupt chromosome.
ChunkEnvelope decode_chunk(std::string_view payload, const TimeGrid& grid);

/// Anything a worker may post on the results topic.
std::variant<ResultEnvelope, RejectMessage> decode_worker_reply(std::string_view payload);

ReadyMessage decode_ready(std::string_view payload);
ControlMessage decode_control(std::string_view payload);

/// Reads `task_id` and `chunk_index` from a payload that may otherwise be
/// malformed, so a NAK can still be addressed. Missing fields come back empty/0.
std::pair<std::string, std::size_t> peek_chunk_address(std::string_view payload);

} // namespace derschedule::dist
