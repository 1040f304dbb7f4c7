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

#include "derschedule/distribution/protocol.hpp"

#include <cstdio>

#include <json.hpp>

#include "derschedule/error.hpp"

namespace derschedule::dist {

using nlohmann::json;

namespace topics {

std::string chunks(std::string_view task_id, std::string_view worker_id) {
    return "task/" + std::string(task_id) + "/chunks/" + std::string(worker_id);
}

std::string results(std::string_view task_id) { return "task/" + std::string(task_id) + "/results"; }

std::string control(std::string_view task_id) { return "task/" + std::string(task_id) + "/control"; }

} // namespace topics

namespace {

json header(std::string_view type) { return json{{"v", protocol_version}, {"type", type}}; }

json parse(std::string_view payload) {
    json j = json::parse(payload.begin(), payload.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ProtocolError("payload is not a JSON object");
    const auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer() || v->get<int>() != protocol_version) {
        throw ProtocolError("unsupported protocol version");
    }
    return j;
}

template <class T>
T field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) throw ProtocolError(std::string("missing field '") + name + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ProtocolError(std::string("field '") + name + "' has the wrong type");
    }
}

std::string type_of(const json& j) { return field<std::string>(j, "type"); }

void expect_type(const json& j, std::string_view type) {
    if (type_of(j) != type) throw ProtocolError("expected a '" + std::string(type) + "' message");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t unhex64(const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos, 16);
        if (pos != s.size()) throw ProtocolError("bad fingerprint");
        return v;
    } catch (const std::logic_error&) {
        throw ProtocolError("bad fingerprint");
    }
}

json encode_result(const EvaluationResult& r) {
    return json{{"cost", r.cost}, {"dtd", r.dtd}, {"hu", r.hu}, {"penalty", r.penalty}, {"fitness", r.fitness}};
}

EvaluationResult decode_result(const json& j) {
    EvaluationResult r;
    r.cost = field<double>(j, "cost");
    r.dtd = field<double>(j, "dtd");
    r.hu = field<std::size_t>(j, "hu");
    r.penalty = field<double>(j, "penalty");
    r.fitness = field<double>(j, "fitness");
    return r;
}

} // namespace

std::string encode(const ChunkEnvelope& m) {
    json j = header("chunk");
    j["task_id"] = m.task_id;
    j["generation"] = m.generation;
    j["chunk_index"] = m.chunk_index;
    j["total_chunks"] = m.total_chunks;
    j["attempt"] = m.attempt;
    j["worker_id"] = m.worker_id;
    json items = json::array();
    for (const auto& item : m.items) {
        json genes = json::array();
        for (const auto& g : item.chromosome.genes) {
            genes.push_back(json::array({g.unit().value, g.start(), g.duration(), g.fraction()}));
        }
        items.push_back(
            json{{"seq", item.seq}, {"prov", to_string(item.chromosome.provenance)}, {"genes", std::move(genes)}});
    }
    j["items"] = std::move(items);
    return j.dump();
}

std::string encode(const ResultEnvelope& m) {
    json j = header("result");
    j["task_id"] = m.task_id;
    j["generation"] = m.generation;
    j["chunk_index"] = m.chunk_index;
    j["worker_id"] = m.worker_id;
    json results = json::array();
    for (const auto& r : m.results) {
        json e = encode_result(r.result);
        e["seq"] = r.seq;
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    return j.dump();
}

std::string encode(const RejectMessage& m) {
    json j = header(m.kind == RejectMessage::Kind::nak ? "nak" : "failure");
    j["task_id"] = m.task_id;
    j["generation"] = m.generation;
    j["chunk_index"] = m.chunk_index;
    j["worker_id"] = m.worker_id;
    j["reason"] = m.reason;
    return j.dump();
}

std::string encode(const ReadyMessage& m) {
    json j = header("ready");
    j["task_id"] = m.task_id;
    j["worker_id"] = m.worker_id;
    j["scenario"] = m.scenario;
    j["fingerprint"] = hex64(m.fingerprint);
    return j.dump();
}

std::string encode(const ControlMessage& m) {
    json j = header(m.kind == ControlMessage::Kind::terminate ? "terminate" : "roll_call");
    j["task_id"] = m.task_id;
    return j.dump();
}

ChunkEnvelope decode_chunk(std::string_view payload, const TimeGrid& grid) {
    const json j = parse(payload);
    expect_type(j, "chunk");
    ChunkEnvelope m;
    m.task_id = field<std::string>(j, "task_id");
    m.generation = field<std::size_t>(j, "generation");
    m.chunk_index = field<std::size_t>(j, "chunk_index");
    m.total_chunks = field<std::size_t>(j, "total_chunks");
    m.attempt = field<std::size_t>(j, "attempt");
    m.worker_id = field<std::string>(j, "worker_id");
    const auto items = field<json>(j, "items");
    if (!items.is_array()) throw ProtocolError("'items' must be an array");
    for (const auto& item : items) {
        SequencedChromosome sc;
        sc.seq = field<std::size_t>(item, "seq");
        try {
            sc.chromosome.provenance = provenance_from_string(field<std::string>(item, "prov"));
        } catch (const ValidationError& e) {
            throw ProtocolError(e.what());
        }
        const auto genes = field<json>(item, "genes");
        if (!genes.is_array()) throw ProtocolError("'genes' must be an array");
        for (const auto& g : genes) {
            if (!g.is_array() || g.size() != 4) throw ProtocolError("a gene is [unit, start, duration, fraction]");
            try {
                sc.chromosome.genes.emplace_back(UnitId{g[0].get<std::int32_t>()}, g[1].get<std::size_t>(),
                                                 g[2].get<std::size_t>(), g[3].get<double>(), grid);
            } catch (const json::exception&) {
                throw ProtocolError("gene field has the wrong type");
            } catch (const ValidationError& e) {
                throw ProtocolError(std::string("invalid gene: ") + e.what());
            }
        }
        m.items.push_back(std::move(sc));
    }
    return m;
}

std::variant<ResultEnvelope, RejectMessage> decode_worker_reply(std::string_view payload) {
    const json j = parse(payload);
    const std::string type = type_of(j);
    if (type == "result") {
        ResultEnvelope m;
        m.task_id = field<std::string>(j, "task_id");
        m.generation = field<std::size_t>(j, "generation");
        m.chunk_index = field<std::size_t>(j, "chunk_index");
        m.worker_id = field<std::string>(j, "worker_id");
        const auto results = field<json>(j, "results");
        if (!results.is_array()) throw ProtocolError("'results' must be an array");
        for (const auto& r : results) {
            m.results.push_back({field<std::size_t>(r, "seq"), decode_result(r)});
        }
        return m;
    }
    if (type == "nak" || type == "failure") {
        RejectMessage m;
        m.kind = type == "nak" ? RejectMessage::Kind::nak : RejectMessage::Kind::failure;
        m.task_id = field<std::string>(j, "task_id");
        m.generation = field<std::size_t>(j, "generation");
        m.chunk_index = field<std::size_t>(j, "chunk_index");
        m.worker_id = field<std::string>(j, "worker_id");
        m.reason = field<std::string>(j, "reason");
        return m;
    }
    throw ProtocolError("unexpected message type '" + type + "' on the results topic");
}

ReadyMessage decode_ready(std::string_view payload) {
    const json j = parse(payload);
    expect_type(j, "ready");
    ReadyMessage m;
    m.task_id = field<std::string>(j, "task_id");
    m.worker_id = field<std::string>(j, "worker_id");
    m.scenario = field<std::string>(j, "scenario");
    m.fingerprint = unhex64(field<std::string>(j, "fingerprint"));
    return m;
}

ControlMessage decode_control(std::string_view payload) {
    const json j = parse(payload);
    ControlMessage m;
    const std::string type = type_of(j);
    if (type == "terminate") {
        m.kind = ControlMessage::Kind::terminate;
    } else if (type == "roll_call") {
        m.kind = ControlMessage::Kind::roll_call;
    } else {
        throw ProtocolError("unexpected control message '" + type + "'");
    }
    m.task_id = field<std::string>(j, "task_id");
    return m;
}

std::pair<std::string, std::size_t> peek_chunk_address(std::string_view payload) {
    const json j = json::parse(payload.begin(), payload.end(), nullptr, false);
    std::pair<std::string, std::size_t> out{"", 0};
    if (j.is_discarded() || !j.is_object()) return out;
    if (auto it = j.find("task_id"); it != j.end() && it->is_string()) out.first = it->get<std::string>();
    if (auto it = j.find("chunk_index"); it != j.end() && it->is_number_unsigned()) {
        out.second = it->get<std::size_t>();
    }
    return out;
}

} // namespace derschedule::dist
