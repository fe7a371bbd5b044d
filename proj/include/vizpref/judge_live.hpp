// Live chat-completions backend. Split from judge.hpp so offline translation
// units do not pull in the HTTP client.

#pragma once

#include "judge.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

namespace vizpref {

inline LiveJudgeConfig live_config_from_env() {
    LiveJudgeConfig config;
    const char* endpoint = std::getenv("JUDGE_ENDPOINT");
    const char* model = std::getenv("JUDGE_MODEL");
    const char* key = std::getenv("JUDGE_API_KEY");
    if (endpoint == nullptr || model == nullptr)
        throw Error("live judge requires JUDGE_ENDPOINT and JUDGE_MODEL");
    config.endpoint = endpoint;
    config.model = model;
    config.api_key = key == nullptr ? "" : key;
    return config;
}

namespace live_detail {

struct Endpoint {
    std::string host_port; // scheme://host:port
    std::string path;
};

inline Endpoint split_endpoint(const std::string& endpoint) {
    std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos)
        throw Error("live judge endpoint must include a scheme: " + endpoint);
    std::size_t path = endpoint.find('/', scheme + 3);
    if (path == std::string::npos) return {endpoint, "/v1/chat/completions"};
    return {endpoint.substr(0, path), endpoint.substr(path)};
}

class LiveJudge : public JudgeBackend {
public:
    explicit LiveJudge(LiveJudgeConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty()) throw Error("live judge: endpoint is empty");
    }

    JudgeResponse judge(const JudgeRequest& request) override {
        request.check();
        nlohmann::json body = {
            {"model", config_.model},
            {"temperature", config_.temperature},
            {"messages",
             nlohmann::json::array({{{"role", "user"}, {"content", request.payload}}})}};

        Endpoint ep = split_endpoint(config_.endpoint);
        httplib::Client client(ep.host_port);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto started = std::chrono::steady_clock::now();
        std::string failure;
        for (int attempt = 0; attempt < config_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    config_.backoff_initial_ms << (attempt - 1)));
            httplib::Result result =
                client.Post(ep.path, headers, body.dump(), "application/json");
            if (!result) {
                failure = "transport error: " + httplib::to_string(result.error());
                continue; // transport failures retry
            }
            if (result->status == 401 || result->status == 403)
                throw Error("live judge: authentication failed (HTTP " +
                            std::to_string(result->status) + ")");
            if (result->status >= 500) {
                failure = "server error: HTTP " + std::to_string(result->status);
                continue; // 5xx retries
            }
            if (result->status != 200)
                throw Error("live judge: HTTP " + std::to_string(result->status) + ": " +
                            result->body);
            return parse_reply(request, result->body, started);
        }
        throw Error("live judge: " + failure + " after " +
                    std::to_string(config_.max_retries) + " attempts");
    }

    std::string id() const override { return "live:" + config_.model; }
    bool offline() const override { return false; }

private:
    JudgeResponse parse_reply(const JudgeRequest& request, const std::string& body,
                              std::chrono::steady_clock::time_point started) const {
        auto elapsed = std::chrono::steady_clock::now() - started;
        JudgeResponse response;
        response.backend = id();
        response.latency_ms =
            std::chrono::duration<double, std::milli>(elapsed).count();
        // Content-level oddities are data, not errors: record whatever came
        // back and let the parsers downstream classify it.
        nlohmann::json reply = nlohmann::json::parse(body, nullptr, false);
        if (!reply.is_discarded() && reply.contains("choices") &&
            reply["choices"].is_array() && !reply["choices"].empty() &&
            reply["choices"][0].contains("message") &&
            reply["choices"][0]["message"].contains("content") &&
            reply["choices"][0]["message"]["content"].is_string()) {
            response.raw_text = reply["choices"][0]["message"]["content"].get<std::string>();
        } else {
            response.raw_text = body;
        }
        if (request.kind == JudgeKind::rank)
            response.parsed = parse_rank_answer(response.raw_text);
        else
            response.completion_text = extract_completion_text(response.raw_text);
        return response;
    }

    LiveJudgeConfig config_;
};

} // namespace live_detail

inline std::unique_ptr<JudgeBackend> make_live_judge(const LiveJudgeConfig& config) {
    return std::make_unique<live_detail::LiveJudge>(config);
}

} // namespace vizpref
