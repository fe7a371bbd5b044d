// Judge abstraction over three backends: a live chat-completions HTTP
// endpoint, transcript replay, and a synthetic oracle driven by a known
// ground-truth model. Every exchange is appended to a JSONL transcript keyed
// by prompt digest, enabling audit and exact offline replay.
//
// Transcript record schema, one JSON object per line:
//   {request_id, pair_id, kind, order, format, prompt_sha256, raw_text,
//    parsed, backend, latency_ms}

#pragma once

#include "chart.hpp"
#include "design_space.hpp"
#include "digest.hpp"
#include "error.hpp"
#include "learner.hpp"
#include "prompt.hpp"
#include "rng.hpp"
#include "scorer.hpp"
#include "vega.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace vizpref {

enum class JudgeKind { rank, recommend };
enum class PairOrder { original, swapped };

inline std::string to_string(JudgeKind k) {
    return k == JudgeKind::rank ? "rank" : "recommend";
}
inline std::string to_string(PairOrder o) {
    return o == PairOrder::original ? "original" : "swapped";
}

struct JudgeRequest {
    JudgeKind kind = JudgeKind::rank;
    Task task = Task::value;
    std::string payload; // rendered prompt text
    std::string pair_id;
    std::optional<PairOrder> order;          // rank only
    std::optional<CompletionFormat> format;  // recommend only
    std::string request_id;

    // Structured context consumed by the oracle backend; live and replay
    // backends act on the payload alone.
    std::optional<ChartSpec> slot1, slot2; // rank: charts as presented
    std::optional<ChartSpec> partial;      // recommend

    void check() const {
        if ((kind == JudgeKind::rank) != order.has_value())
            throw Error("judge request: order must be present iff kind is rank");
        if (kind == JudgeKind::recommend && !format.has_value())
            throw Error("judge request: recommend requires a format");
    }
};

struct JudgeResponse {
    std::string raw_text;
    RankAnswer parsed = RankAnswer::unparseable; // rank
    std::string completion_text;                 // recommend
    double latency_ms = 0.0;
    std::string backend;
};

struct TranscriptRecord {
    std::string request_id;
    std::string pair_id;
    std::string kind;
    std::string order;  // empty for recommend
    std::string format; // empty for rank
    std::string prompt_sha256;
    std::string raw_text;
    std::string parsed; // rank verdict token or completion text
    std::string backend;
    double latency_ms = 0.0;
};

inline nlohmann::json to_json(const TranscriptRecord& r) {
    return {{"request_id", r.request_id}, {"pair_id", r.pair_id},
            {"kind", r.kind},             {"order", r.order},
            {"format", r.format},         {"prompt_sha256", r.prompt_sha256},
            {"raw_text", r.raw_text},     {"parsed", r.parsed},
            {"backend", r.backend},       {"latency_ms", r.latency_ms}};
}

inline TranscriptRecord transcript_record_from_json(const nlohmann::json& j) {
    TranscriptRecord r;
    r.request_id = j.at("request_id").get<std::string>();
    r.pair_id = j.at("pair_id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.order = j.value("order", "");
    r.format = j.value("format", "");
    r.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.parsed = j.at("parsed").get<std::string>();
    r.backend = j.at("backend").get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    return r;
}

/// Append-only transcript. Records are never mutated after append.
class Transcript {
public:
    Transcript() = default;

    static Transcript load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open transcript: " + path);
        Transcript t;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded())
                throw Error("transcript " + path + " line " + std::to_string(line_no) +
                            ": invalid JSON");
            t.append(transcript_record_from_json(j));
        }
        return t;
    }

    void append(TranscriptRecord record) {
        by_digest_.emplace(record.prompt_sha256, records_.size());
        records_.push_back(std::move(record));
    }

    const std::vector<TranscriptRecord>& records() const { return records_; }

    const TranscriptRecord* find_by_digest(const std::string& digest) const {
        auto it = by_digest_.find(digest);
        return it == by_digest_.end() ? nullptr : &records_[it->second];
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write transcript: " + path);
        for (const auto& r : records_) out << to_json(r).dump() << '\n';
    }

private:
    std::vector<TranscriptRecord> records_;
    std::map<std::string, std::size_t> by_digest_;
};

class JudgeBackend {
public:
    virtual ~JudgeBackend() = default;
    virtual JudgeResponse judge(const JudgeRequest& request) = 0;
    virtual std::string id() const = 0;
    /// Replay and oracle need no network and no credentials.
    virtual bool offline() const = 0;
};

struct OracleConfig {
    PreferenceModel ground_truth;
    double positional_bias = 0.0; // probability of overriding with "first option"
    std::uint64_t noise_seed = 0;
};

/// Synthetic judge: ranks by ground-truth cost, recommends the minimum-cost
/// valid completion. Cost ties resolve to slot 1 in both orders, so tied
/// pairs surface as inconsistent downstream, which is what the consistency
/// filter exists to catch. The positional-bias override is drawn per
/// (pair_id, order), independent of scheduling, so runs reproduce exactly.
class OracleJudge : public JudgeBackend {
public:
    OracleJudge(OracleConfig config, const ConstraintCatalog& catalog)
        : config_(std::move(config)), catalog_(catalog) {
        if (config_.positional_bias < 0.0 || config_.positional_bias > 1.0)
            throw Error("oracle: positional_bias must be in [0, 1]");
        if (config_.ground_truth.catalog_hash != catalog_.catalog_hash)
            throw Error("oracle: ground truth bound to a different catalog");
    }

    JudgeResponse judge(const JudgeRequest& request) override {
        request.check();
        JudgeResponse response;
        response.backend = id();
        response.latency_ms = 0.0; // synthetic; keeps reruns byte-identical
        if (request.kind == JudgeKind::rank) {
            if (!request.slot1 || !request.slot2)
                throw Error("oracle: rank request lacks chart context");
            double cost_1 = cost(config_.ground_truth, catalog_, *request.slot1).cost;
            double cost_2 = cost(config_.ground_truth, catalog_, *request.slot2).cost;
            bool first_wins = !(cost_2 < cost_1 - kCostTieTolerance);
            std::uint64_t h = hash64(config_.noise_seed, request.pair_id + "|" +
                                                             to_string(*request.order));
            if (unit_from_hash(h) < config_.positional_bias) first_wins = true;
            response.raw_text = first_wins ? "Chart 1" : "Chart 2";
            response.parsed = parse_rank_answer(response.raw_text);
        } else {
            if (!request.partial) throw Error("oracle: recommend request lacks partial");
            std::vector<ChartSpec> completions =
                complete_enumeration(catalog_, *request.partial);
            const ChartSpec* best = nullptr;
            double best_cost = 0.0;
            std::string best_key;
            for (const auto& candidate : completions) {
                double c = cost(config_.ground_truth, catalog_, candidate).cost;
                // ties broken by canonical serialization order
                std::string key = serialize_dictionary(candidate);
                if (best == nullptr || c < best_cost - kCostTieTolerance ||
                    (std::abs(c - best_cost) <= kCostTieTolerance && key < best_key)) {
                    best = &candidate;
                    best_cost = c;
                    best_key = key;
                }
            }
            response.raw_text = *request.format == CompletionFormat::vegalite
                                    ? to_vegalite(*best)
                                    : serialize_dictionary(*best);
            response.completion_text = response.raw_text;
        }
        return response;
    }

    std::string id() const override { return "oracle"; }
    bool offline() const override { return true; }

private:
    OracleConfig config_;
    const ConstraintCatalog& catalog_;
};

/// Replays a recorded transcript; lookup by prompt digest, so any drift in
/// prompt construction surfaces as a digest miss instead of a silent mismatch.
class ReplayJudge : public JudgeBackend {
public:
    explicit ReplayJudge(Transcript transcript) : transcript_(std::move(transcript)) {}

    JudgeResponse judge(const JudgeRequest& request) override {
        request.check();
        std::string digest = sha256_hex(request.payload);
        const TranscriptRecord* record = transcript_.find_by_digest(digest);
        if (record == nullptr)
            throw Error("replay: no transcript record for prompt digest " + digest +
                        " (pair " + request.pair_id + ")");
        JudgeResponse response;
        response.raw_text = record->raw_text;
        response.backend = id();
        response.latency_ms = 0.0;
        if (request.kind == JudgeKind::rank)
            response.parsed = parse_rank_answer(response.raw_text);
        else
            response.completion_text = extract_completion_text(response.raw_text);
        return response;
    }

    std::string id() const override { return "replay"; }
    bool offline() const override { return true; }

private:
    Transcript transcript_;
};

struct LiveJudgeConfig {
    std::string endpoint;   // e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string api_key;    // from JUDGE_API_KEY; never logged
    int max_retries = 3;    // transport/5xx only; content oddities are data
    int backoff_initial_ms = 1000;
    double temperature = 0.0;
};

// The chat-completions HTTP backend lives in judge_live.hpp (declares
// make_live_judge and live_config_from_env, which reads JUDGE_ENDPOINT,
// JUDGE_MODEL, JUDGE_API_KEY); include it explicitly to keep the socket
// dependency out of offline translation units.

/// Owns a backend plus the run transcript. judge_rank/judge_recommend append
/// each exchange; judge_batch issues requests concurrently up to the
/// in-flight bound and commits responses in request order regardless of
/// completion order.
class JudgeSession {
public:
    JudgeSession(std::unique_ptr<JudgeBackend> backend, int max_in_flight = 4)
        : backend_(std::move(backend)), max_in_flight_(max_in_flight) {
        if (max_in_flight_ < 1) throw Error("judge session: in-flight bound must be >= 1");
    }

    JudgeResponse judge_rank(const JudgeRequest& request) {
        if (request.kind != JudgeKind::rank) throw Error("judge_rank: wrong request kind");
        return judge_and_record(request);
    }

    JudgeResponse judge_recommend(const JudgeRequest& request) {
        if (request.kind != JudgeKind::recommend)
            throw Error("judge_recommend: wrong request kind");
        return judge_and_record(request);
    }

    std::vector<JudgeResponse> judge_batch(const std::vector<JudgeRequest>& requests) {
        std::vector<JudgeResponse> responses(requests.size());
        std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(max_in_flight_), requests.size());
        if (workers <= 1) {
            for (std::size_t i = 0; i < requests.size(); ++i)
                responses[i] = judge_and_record(requests[i]);
            return responses;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= requests.size()) break;
                try {
                    requests[i].check();
                    responses[i] = backend_->judge(requests[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    break;
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
        // committed in request order regardless of completion order
        for (std::size_t i = 0; i < requests.size(); ++i)
            record(requests[i], responses[i]);
        return responses;
    }

    const Transcript& transcript() const { return transcript_; }
    const JudgeBackend& backend() const { return *backend_; }

private:
    JudgeResponse judge_and_record(const JudgeRequest& request) {
        request.check();
        JudgeResponse response = backend_->judge(request);
        record(request, response);
        return response;
    }

    void record(const JudgeRequest& request, const JudgeResponse& response) {
        TranscriptRecord r;
        r.request_id = request.request_id;
        r.pair_id = request.pair_id;
        r.kind = to_string(request.kind);
        if (request.order) r.order = to_string(*request.order);
        if (request.format) r.format = to_string(*request.format);
        r.prompt_sha256 = sha256_hex(request.payload);
        r.raw_text = response.raw_text;
        r.parsed = request.kind == JudgeKind::rank ? to_string(response.parsed)
                                                   : response.completion_text;
        r.backend = response.backend;
        r.latency_ms = response.latency_ms;
        std::lock_guard<std::mutex> lock(transcript_mutex_);
        transcript_.append(std::move(r));
    }

    std::unique_ptr<JudgeBackend> backend_;
    Transcript transcript_;
    std::mutex transcript_mutex_;
    int max_in_flight_;
};

} // namespace vizpref
