// Eigen comes in through embed.hpp and must precede httplib, whose resolver
// headers define a _res macro that collides with Eigen parameter names.
#include "stackdigest/embed.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <thread>

namespace stackdigest {

namespace {

const char* kind_label(EmbedError::Kind kind) {
    switch (kind) {
        case EmbedError::Kind::Transport: return "transport failure";
        case EmbedError::Kind::Status: return "bad status";
        case EmbedError::Kind::DimMismatch: return "dim mismatch";
        case EmbedError::Kind::CountMismatch: return "count mismatch";
        case EmbedError::Kind::Protocol: return "protocol error";
    }
    return "error";
}

struct Endpoint {
    std::string base;    // scheme://host[:port]
    std::string prefix;  // path prefix without trailing '/'
};

Endpoint split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Endpoint e;
    if (path_start == std::string::npos) {
        e.base = endpoint;
    } else {
        e.base = endpoint.substr(0, path_start);
        e.prefix = endpoint.substr(path_start);
    }
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    return e;
}

std::vector<EmbeddingVector> decode_response(const std::string& endpoint, const std::string& body,
                                             std::size_t expected_count,
                                             const std::optional<std::size_t>& expected_dim) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw EmbedError(EmbedError::Kind::Protocol, endpoint, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_unsigned() || !j.contains("vectors") ||
        !j["vectors"].is_array()) {
        throw EmbedError(EmbedError::Kind::Protocol, endpoint, "response lacks \"dim\" or \"vectors\"");
    }
    const auto dim = j["dim"].get<std::size_t>();
    if (expected_dim && dim != *expected_dim) {
        throw EmbedError(EmbedError::Kind::DimMismatch, endpoint,
                         "advertised dim " + std::to_string(dim) + ", expected " + std::to_string(*expected_dim));
    }
    const auto& vectors = j["vectors"];
    if (vectors.size() != expected_count) {
        throw EmbedError(EmbedError::Kind::CountMismatch, endpoint,
                         std::to_string(vectors.size()) + " vectors for " + std::to_string(expected_count) +
                             " texts");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    for (const auto& row : vectors) {
        if (!row.is_array() || row.size() != dim) {
            throw EmbedError(EmbedError::Kind::DimMismatch, endpoint,
                             "vector of length " + std::to_string(row.is_array() ? row.size() : 0) +
                                 ", advertised dim " + std::to_string(dim));
        }
        std::vector<float> values;
        values.reserve(dim);
        for (const auto& v : row) {
            if (!v.is_number()) throw EmbedError(EmbedError::Kind::Protocol, endpoint, "non-numeric vector entry");
            const auto f = static_cast<float>(v.get<double>());
            if (!std::isfinite(f)) throw EmbedError(EmbedError::Kind::Protocol, endpoint, "non-finite vector entry");
            values.push_back(f);
        }
        out.emplace_back(std::move(values));
    }
    return out;
}

}  // namespace

EmbedError::EmbedError(Kind kind, const std::string& endpoint, const std::string& detail)
    : std::runtime_error(std::string(kind_label(kind)) + " from " + endpoint + ": " + detail), kind_(kind) {}

std::vector<EmbeddingVector> http_embed_batch(const std::string& endpoint, std::span<const std::string> texts,
                                              const HttpEmbedOptions& options) {
    const Endpoint ep = split_endpoint(endpoint);
    const std::string body = nlohmann::json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
    const int attempts = std::max(1, options.attempts);
    auto backoff = options.initial_backoff;

    for (int attempt = 1;; ++attempt) {
        httplib::Client client(ep.base);
        client.set_connection_timeout(options.timeout);
        client.set_read_timeout(options.timeout);
        client.set_write_timeout(options.timeout);
        auto res = client.Post(ep.prefix + "/v1/embed", body, "application/json");

        std::optional<EmbedError> failure;
        if (!res) {
            failure.emplace(EmbedError::Kind::Transport, endpoint, httplib::to_string(res.error()));
        } else if (res->status < 200 || res->status >= 300) {
            std::string detail = "HTTP " + std::to_string(res->status);
            try {
                auto j = nlohmann::json::parse(res->body);
                if (j.contains("error") && j["error"].is_string()) detail += ": " + j["error"].get<std::string>();
            } catch (const nlohmann::json::exception&) {
            }
            EmbedError err(EmbedError::Kind::Status, endpoint, detail);
            // Client errors will not improve on retry.
            if (res->status < 500) throw err;
            failure.emplace(std::move(err));
        } else {
            return decode_response(endpoint, res->body, texts.size(), options.expected_dim);
        }

        if (attempt >= attempts) throw *failure;
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::size_t dim, HttpEmbedOptions options)
    : endpoint_(std::move(endpoint)), dim_(dim), options_(std::move(options)) {
    options_.expected_dim = dim_;
}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(std::span<const std::string> texts) {
    if (texts.empty()) return {};
    return http_embed_batch(endpoint_, texts, options_);
}

}  // namespace stackdigest
