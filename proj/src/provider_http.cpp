#include "qasc/provider_http.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace qasc {

using nlohmann::json;

RemoteProvider::RemoteProvider(std::string base_url, std::size_t expected_dim, int timeout_seconds)
    : base_url_(std::move(base_url)), dim_(expected_dim), timeout_seconds_(timeout_seconds) {
    if (base_url_.empty()) throw ValidationError("RemoteProvider: empty base url");
}

std::string RemoteProvider::name() const {
    return "remote(" + base_url_ + ")";
}

std::vector<EmbeddingVector> RemoteProvider::embed_batch(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ValidationError("embed_batch: empty batch");

    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    json body;
    body["texts"] = texts;

    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res) {
        throw ProviderError("remote provider unreachable: " + base_url_, /*retriable=*/true,
                            texts.size());
    }
    if (res->status != 200) {
        throw ProviderError("remote provider returned HTTP " + std::to_string(res->status),
                            /*retriable=*/true, texts.size());
    }

    json parsed;
    try {
        parsed = json::parse(res->body);
    } catch (const json::exception& e) {
        throw ProviderError(std::string("remote provider returned malformed JSON: ") + e.what(),
                            /*retriable=*/true, texts.size());
    }
    if (!parsed.contains("vectors") || !parsed["vectors"].is_array()) {
        throw ProviderError("remote provider response missing \"vectors\"", /*retriable=*/true,
                            texts.size());
    }

    const auto& vectors = parsed["vectors"];
    if (vectors.size() != texts.size()) {
        throw ProviderError("remote provider returned " + std::to_string(vectors.size()) +
                                " vectors for " + std::to_string(texts.size()) + " texts",
                            /*retriable=*/false, texts.size());
    }

    std::size_t reported_dim = dim_;
    if (parsed.contains("dim") && parsed["dim"].is_number_unsigned()) {
        reported_dim = parsed["dim"].get<std::size_t>();
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& entry : vectors) {
        if (!entry.is_array()) {
            throw ProviderError("remote provider vector entry is not an array", /*retriable=*/true,
                                texts.size());
        }
        EmbeddingVector v;
        v.reserve(entry.size());
        for (const auto& x : entry) {
            if (!x.is_number()) {
                throw ProviderError("remote provider vector holds a non-numeric value",
                                    /*retriable=*/true, texts.size());
            }
            const double value = x.get<double>();
            if (!std::isfinite(value)) {
                throw ProviderError("remote provider vector holds a non-finite value",
                                    /*retriable=*/true, texts.size());
            }
            v.push_back(value);
        }
        if (dim_ == 0 && reported_dim == 0) reported_dim = v.size();
        const std::size_t want = dim_ != 0 ? dim_ : reported_dim;
        if (v.size() != want) {
            throw ProviderError("remote provider dimension mismatch: expected " +
                                    std::to_string(want) + ", got " + std::to_string(v.size()),
                                /*retriable=*/false, texts.size());
        }
        out.push_back(std::move(v));
    }
    if (dim_ == 0) dim_ = reported_dim;
    return out;
}

}  // namespace qasc
