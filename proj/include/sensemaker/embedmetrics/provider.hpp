#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/hash.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/embedmetrics/relevance.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::embedmetrics {

/// Maps texts to equal-dimension real vectors.
class EmbeddingProvider
{
public:
    virtual ~EmbeddingProvider() = default;

    [[nodiscard]] virtual std::string model_id() const = 0;

    /// Returns one vector per input text, in order.
    virtual std::vector<Vector> embed(std::vector<std::string> const & texts) = 0;
};

/// Offline bag-of-words embedder using signed feature hashing of unigrams and
/// bigrams. Deterministic and dependency-free; meant for hermetic runs, not
/// as a substitute for a sentence-embedding model.
class HashingEmbedder final : public EmbeddingProvider
{
public:
    explicit HashingEmbedder(std::size_t dim = 256)
    : dim_(dim)
    {
        if (dim_ < 2) {
            throw ArgumentError("HashingEmbedder: dimension must be at least 2");
        }
    }

    [[nodiscard]] std::string model_id() const override { return "hashing-" + std::to_string(dim_); }

    std::vector<Vector> embed(std::vector<std::string> const & texts) override
    {
        std::vector<Vector> out;
        out.reserve(texts.size());
        for (auto const & t : texts) {
            out.push_back(embed_one(t));
        }
        return out;
    }

private:
    Vector embed_one(std::string const & text) const
    {
        Vector v(dim_, 0.0);
        // the last component is a constant bias so that no vector is zero
        std::size_t const buckets = dim_ - 1;
        v[buckets] = 0.1;
        auto const tokens = alnum_tokens(text);
        auto add = [&](std::string const & feature, double weight) {
            auto const h = splitmix64(fnv1a(feature));
            v[h % buckets] += (h >> 63) != 0 ? -weight : weight;
        };
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            add(tokens[i], 1.0);
            if (i + 1 < tokens.size()) {
                add(tokens[i] + " " + tokens[i + 1], 0.5);
            }
        }
        return v;
    }

    std::size_t dim_;
};

/// Disk cache in front of another provider. Entries are keyed by
/// (model id, SHA-256 of the text); one JSON file per entry.
class CachingEmbedder final : public EmbeddingProvider
{
public:
    CachingEmbedder(std::shared_ptr<EmbeddingProvider> inner, std::filesystem::path dir)
    : inner_(std::move(inner))
    , dir_(std::move(dir))
    {}

    [[nodiscard]] std::string model_id() const override { return inner_->model_id(); }

    std::vector<Vector> embed(std::vector<std::string> const & texts) override
    {
        std::lock_guard lock(mutex_);
        std::vector<Vector> out(texts.size());
        std::vector<std::string> missing;
        std::vector<std::size_t> missing_at;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (auto hit = lookup(texts[i])) {
                out[i] = std::move(*hit);
            } else {
                missing.push_back(texts[i]);
                missing_at.push_back(i);
            }
        }
        if (!missing.empty()) {
            auto fresh = inner_->embed(missing);
            if (fresh.size() != missing.size()) {
                throw ProviderError("embedding provider returned " + std::to_string(fresh.size())
                                    + " vectors for " + std::to_string(missing.size()) + " texts");
            }
            for (std::size_t k = 0; k < missing.size(); ++k) {
                store(missing[k], fresh[k]);
                out[missing_at[k]] = std::move(fresh[k]);
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t misses() const noexcept { return misses_; }

private:
    std::filesystem::path path_for(std::string const & text) const
    {
        auto const model_key = sha256_hex(inner_->model_id()).substr(0, 16);
        auto const key = sha256_hex(inner_->model_id() + "\n" + text);
        return dir_ / "embeddings" / model_key / (key + ".json");
    }

    std::optional<Vector> lookup(std::string const & text)
    {
        auto const path = path_for(text);
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            ++misses_;
            return std::nullopt;
        }
        try {
            auto const j = nlohmann::json::parse(in);
            return j.at("embedding").get<Vector>();
        } catch (nlohmann::json::exception const &) {
            ++misses_;
            return std::nullopt;
        }
    }

    void store(std::string const & text, Vector const & v)
    {
        auto const path = path_for(text);
        std::filesystem::create_directories(path.parent_path());
        nlohmann::json j = {{"model", inner_->model_id()}, {"text_sha256", sha256_hex(text)}, {"embedding", v}};
        auto const tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << j.dump();
        }
        std::filesystem::rename(tmp, path);
    }

    std::shared_ptr<EmbeddingProvider> inner_;
    std::filesystem::path dir_;
    std::mutex mutex_;
    std::size_t misses_ = 0;
};

} // namespace sensemaker::embedmetrics
