#pragma once

#include "sensemaker/common/error.hpp"

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <string>
#include <utility>

namespace sensemaker::http {

/// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
inline std::pair<std::string, std::string> split_url(std::string const & url)
{
    auto const scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("provider URL must start with http:// or https://: '" + url + "'");
    }
    auto const path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
        return {url, ""};
    }
    auto path = url.substr(path_begin);
    while (!path.empty() && path.back() == '/') {
        path.pop_back();
    }
    return {url.substr(0, path_begin), path};
}

/// POSTs a JSON body and returns the parsed JSON response. Transport errors,
/// non-2xx statuses and unparseable bodies raise ProviderError.
inline nlohmann::json post_json(std::string const & base_url,
                                std::string const & endpoint,
                                nlohmann::json const & body,
                                std::string const & bearer_token,
                                int timeout_seconds = 120)
{
    auto const [origin, prefix] = split_url(base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    httplib::Headers headers;
    if (!bearer_token.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token);
    }
    auto const path = prefix + endpoint;
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw ProviderError("POST " + origin + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ProviderError("POST " + origin + path + " returned HTTP " + std::to_string(res->status) + ": "
                            + res->body.substr(0, 500));
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (nlohmann::json::parse_error const & e) {
        throw ProviderError("POST " + origin + path + " returned invalid JSON: " + e.what());
    }
}

} // namespace sensemaker::http
