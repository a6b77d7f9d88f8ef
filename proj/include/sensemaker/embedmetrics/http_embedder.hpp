#pragma once

#include "sensemaker/common/http.hpp"
#include "sensemaker/embedmetrics/provider.hpp"

namespace sensemaker::embedmetrics {

/// Client for an OpenAI-style embeddings endpoint:
/// POST {base_url}/embeddings {"model", "input": [...]} ->
/// {"data": [{"index", "embedding": [...]}, ...]}.
class HttpEmbedder final : public EmbeddingProvider
{
public:
    HttpEmbedder(std::string base_url, std::string model, std::string api_key = {}, std::size_t batch_size = 64)
    : base_url_(std::move(base_url))
    , model_(std::move(model))
    , api_key_(std::move(api_key))
    , batch_size_(batch_size == 0 ? 1 : batch_size)
    {}

    [[nodiscard]] std::string model_id() const override { return model_; }

    std::vector<Vector> embed(std::vector<std::string> const & texts) override
    {
        std::vector<Vector> out;
        out.reserve(texts.size());
        for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
            auto const end = std::min(texts.size(), begin + batch_size_);
            std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                           texts.begin() + static_cast<std::ptrdiff_t>(end));
            auto vectors = request(batch);
            for (auto & v : vectors) {
                out.push_back(std::move(v));
            }
        }
        if (!out.empty()) {
            for (auto const & v : out) {
                if (v.size() != out.front().size()) {
                    throw ProviderError("embedding endpoint returned vectors of unequal dimension");
                }
            }
        }
        return out;
    }

private:
    std::vector<Vector> request(std::vector<std::string> const & batch)
    {
        nlohmann::json body = {{"model", model_}, {"input", batch}};
        auto const reply = http::post_json(base_url_, "/embeddings", body, api_key_);
        try {
            auto const & data = reply.at("data");
            std::vector<Vector> out(batch.size());
            std::vector<bool> seen(batch.size(), false);
            for (std::size_t i = 0; i < data.size(); ++i) {
                auto const index = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
                if (index >= batch.size() || seen[index]) {
                    throw ProviderError("embedding endpoint returned an unexpected index");
                }
                out[index] = data[i].at("embedding").get<Vector>();
                seen[index] = true;
            }
            for (bool s : seen) {
                if (!s) {
                    throw ProviderError("embedding endpoint returned fewer vectors than inputs");
                }
            }
            return out;
        } catch (nlohmann::json::exception const & e) {
            throw ProviderError(std::string("malformed embedding response: ") + e.what());
        }
    }

    std::string base_url_;
    std::string model_;
    std::string api_key_;
    std::size_t batch_size_;
};

} // namespace sensemaker::embedmetrics
