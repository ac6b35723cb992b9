#pragma once

#include <string>
#include <vector>

#include "qasc/embedding.hpp"

namespace qasc {

/// Embedding provider backed by an HTTP service.
///
/// Wire protocol: POST /embed with body {"texts": [string, ...]} returns
/// {"vectors": [[number, ...], ...], "dim": integer}. A non-200 status,
/// unreachable host or malformed body raises a retriable ProviderError; a
/// vector count or dimension mismatch is a fatal contract violation.
class RemoteProvider : public EmbeddingProvider {
public:
    /// expected_dim = 0 pins the dimension from the first response.
    explicit RemoteProvider(std::string base_url, std::size_t expected_dim = 0,
                            int timeout_seconds = 30);

    std::string name() const override;
    std::size_t dim() const override { return dim_; }
    bool deterministic() const override { return false; }
    bool concurrent_safe() const override { return false; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    std::string base_url_;
    std::size_t dim_;
    int timeout_seconds_;
};

}  // namespace qasc
