#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/hash.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::llmroles {

using nlohmann::json;

struct Message
{
    std::string role;
    std::string content;
};

struct ChatRequest
{
    std::string model;
    std::vector<Message> messages;
    /// JSON schema the reply must satisfy, sent as a structured-output format.
    std::optional<json> structured_schema;
    std::string schema_name = "reply";
    double temperature = 0.0;
    int max_retries = 3;
    /// Retry counter. Part of the cache key so that a retry is a new request.
    int attempt = 0;
    /// Role that issued the request ("teacher", "student", ...).
    std::string task;
    /// Structured inputs behind the rendered prompt. Never sent over the
    /// wire and not part of the cache key; simulated providers read them.
    json annotations = json::object();
};

inline void validate(ChatRequest const & r)
{
    if (r.messages.empty()) {
        throw ArgumentError("chat request has no messages");
    }
    if (!(r.temperature >= 0.0)) {
        throw ArgumentError("chat request temperature must be non-negative");
    }
}

/// Chat-completions request body as sent to an OpenAI-compatible endpoint.
inline json wire_body(ChatRequest const & r)
{
    json messages = json::array();
    for (auto const & m : r.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    json body = {{"model", r.model}, {"messages", std::move(messages)}, {"temperature", r.temperature}};
    if (r.structured_schema) {
        body["response_format"] = {
            {"type", "json_schema"},
            {"json_schema", {{"name", r.schema_name}, {"strict", true}, {"schema", *r.structured_schema}}}};
    }
    return body;
}

inline std::string cache_key(ChatRequest const & r)
{
    return sha256_hex(wire_body(r).dump() + "\nattempt=" + std::to_string(r.attempt));
}

/// Anything that turns a chat request into assistant text.
class ChatProvider
{
public:
    virtual ~ChatProvider() = default;

    /// Returns the assistant reply text. Throws ProviderError on failure.
    virtual std::string complete(ChatRequest const & request) = 0;
};

/// Wraps a callable; handy for tests and scripted judges.
class FunctionChatProvider final : public ChatProvider
{
public:
    using Fn = std::function<std::string(ChatRequest const &)>;

    explicit FunctionChatProvider(Fn fn)
    : fn_(std::move(fn))
    {}

    std::string complete(ChatRequest const & request) override
    {
        ++calls_;
        return fn_(request);
    }

    [[nodiscard]] std::size_t calls() const noexcept { return calls_; }

private:
    Fn fn_;
    std::atomic<std::size_t> calls_{0};
};

/// Content-addressed response cache in front of another provider. One file
/// per request hash holds the request body and the reply. A warm cache
/// answers without touching the inner provider.
class CachingChatProvider final : public ChatProvider
{
public:
    CachingChatProvider(std::shared_ptr<ChatProvider> inner, std::filesystem::path dir)
    : inner_(std::move(inner))
    , dir_(std::move(dir))
    {}

    std::string complete(ChatRequest const & request) override
    {
        validate(request);
        auto const key = cache_key(request);
        auto const path = dir_ / key.substr(0, 2) / (key + ".json");
        {
            std::lock_guard lock(mutex_);
            if (auto hit = read(path)) {
                ++hits_;
                return *hit;
            }
        }
        auto reply = inner_->complete(request);
        ++upstream_calls_;
        std::lock_guard lock(mutex_);
        write(path, request, reply);
        return reply;
    }

    [[nodiscard]] std::size_t upstream_calls() const noexcept { return upstream_calls_; }
    [[nodiscard]] std::size_t hits() const noexcept { return hits_; }

private:
    static std::optional<std::string> read(std::filesystem::path const & path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            return std::nullopt;
        }
        try {
            auto const j = json::parse(in);
            return j.at("response").get<std::string>();
        } catch (json::exception const &) {
            return std::nullopt;
        }
    }

    static void write(std::filesystem::path const & path, ChatRequest const & request, std::string const & reply)
    {
        std::filesystem::create_directories(path.parent_path());
        json j = {{"request", wire_body(request)}, {"attempt", request.attempt}, {"response", reply}};
        auto const tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << j.dump(2);
        }
        std::filesystem::rename(tmp, path);
    }

    std::shared_ptr<ChatProvider> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::atomic<std::size_t> upstream_calls_{0};
    std::atomic<std::size_t> hits_{0};
};

} // namespace sensemaker::llmroles
