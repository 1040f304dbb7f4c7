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

/// @file chunking.hpp
/// @brief Even splitting of an evaluation batch and order-restoring join.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "derschedule/distribution/protocol.hpp"

namespace derschedule::dist {

/// Sizes of an even split of `n` items over `k` workers: min(k, n) chunks whose
/// sizes differ by at most one, larger chunks first. Throws ConfigError on k = 0.
std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t k);

/// Splits `batch` into contiguous chunks with global sequence numbers. The
/// `worker_id` and `attempt` fields are left for the dispatcher to fill.
std::vector<ChunkEnvelope> split(std::span<const Chromosome> batch, std::size_t k, const std::string& task_id = {},
                                 std::size_t generation = 0);

/// Reassembles results in batch order.
///
/// Throws WorkerLossError naming the first missing chunk, ProtocolError on a
/// duplicate chunk index, an out-of-range chunk index, or sequence numbers that
/// do not cover [0, batch_size) exactly once.
std::vector<EvaluationResult> join(std::span<const ResultEnvelope> results, std::size_t expected_chunks,
                                   std::size_t batch_size);

} // namespace derschedule::dist
