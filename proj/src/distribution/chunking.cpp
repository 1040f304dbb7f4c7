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

#include "derschedule/distribution/chunking.hpp"

#include <algorithm>
#include <optional>

#include "derschedule/error.hpp"

namespace derschedule::dist {

std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t k) {
    if (k == 0) throw ConfigError("worker count must be at least 1");
    const std::size_t chunks = std::min(k, n);
    std::vector<std::size_t> sizes;
    sizes.reserve(chunks);
    for (std::size_t i = 0; i < chunks; ++i) sizes.push_back(n / chunks + (i < n % chunks ? 1 : 0));
    return sizes;
}

std::vector<ChunkEnvelope> split(std::span<const Chromosome> batch, std::size_t k, const std::string& task_id,
                                 std::size_t generation) {
    const auto sizes = chunk_sizes(batch.size(), k);
    std::vector<ChunkEnvelope> chunks;
    chunks.reserve(sizes.size());
    std::size_t seq = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        ChunkEnvelope c;
        c.task_id = task_id;
        c.generation = generation;
        c.chunk_index = i;
        c.total_chunks = sizes.size();
        c.items.reserve(sizes[i]);
        for (std::size_t j = 0; j < sizes[i]; ++j, ++seq) c.items.push_back({seq, batch[seq]});
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<EvaluationResult> join(std::span<const ResultEnvelope> results, std::size_t expected_chunks,
                                   std::size_t batch_size) {
    std::vector<const ResultEnvelope*> by_index(expected_chunks, nullptr);
    for (const auto& r : results) {
        if (r.chunk_index >= expected_chunks) {
            throw ProtocolError("chunk index " + std::to_string(r.chunk_index) + " out of range");
        }
        if (by_index[r.chunk_index]) {
            throw ProtocolError("duplicate result for chunk " + std::to_string(r.chunk_index));
        }
        by_index[r.chunk_index] = &r;
    }
    for (std::size_t i = 0; i < expected_chunks; ++i) {
        if (!by_index[i]) throw WorkerLossError(i, "missing result");
    }

    std::vector<std::optional<EvaluationResult>> slots(batch_size);
    for (const auto* r : by_index) {
        for (const auto& sr : r->results) {
            if (sr.seq >= batch_size) {
                throw ProtocolError("sequence number " + std::to_string(sr.seq) + " outside the batch");
            }
            if (slots[sr.seq]) throw ProtocolError("sequence number " + std::to_string(sr.seq) + " repeated");
            slots[sr.seq] = sr.result;
        }
    }
    std::vector<EvaluationResult> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        if (!slots[i]) throw ProtocolError("no result for sequence number " + std::to_string(i));
        out.push_back(*slots[i]);
    }
    return out;
}

} // namespace derschedule::dist
