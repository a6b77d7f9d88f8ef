#pragma once

#include "sensemaker/common/http.hpp"
#include "sensemaker/llmroles/chat.hpp"

namespace sensemaker::llmroles {

/// OpenAI-compatible chat-completions client:
/// POST {base_url}/chat/completions -> choices[0].message.content.
class HttpChatProvider final : public ChatProvider
{
public:
    HttpChatProvider(std::string base_url, std::string api_key, int timeout_seconds = 120)
    : base_url_(std::move(base_url))
    , api_key_(std::move(api_key))
    , timeout_seconds_(timeout_seconds)
    {}

    std::string complete(ChatRequest const & request) override
    {
        validate(request);
        auto const reply = http::post_json(base_url_, "/chat/completions", wire_body(request), api_key_,
                                           timeout_seconds_);
        try {
            auto const & content = reply.at("choices").at(0).at("message").at("content");
            if (content.is_null()) {
                throw ProviderError("chat endpoint returned no content");
            }
            return content.get<std::string>();
        } catch (json::exception const & e) {
            throw ProviderError(std::string("malformed chat completion response: ") + e.what());
        }
    }

private:
    std::string base_url_;
    std::string api_key_;
    int timeout_seconds_;
};

} // namespace sensemaker::llmroles
