#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qasc/errors.hpp"

namespace qasc {

using EmbeddingVector = std::vector<double>;

/// Per-sentence cosine similarity of a document against one query, aligned
/// to 1-based sentence indices (scores[0] belongs to sentence 1).
struct SimilarityProfile {
    std::string doc_id;
    std::string query_id;
    std::vector<double> scores;

    int size() const { return static_cast<int>(scores.size()); }
    double at(int sentence_index) const { return scores[static_cast<std::size_t>(sentence_index - 1)]; }
};

/// Contract every embedding backend satisfies. A deterministic provider
/// returns bitwise-equal vectors for equal input text. Providers declaring
/// concurrent_safe() may receive embed_batch calls from multiple threads;
/// otherwise the pipeline serializes access.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual bool deterministic() const = 0;
    virtual bool concurrent_safe() const { return false; }

    /// One vector per input text, in order, all with dimension dim().
    /// Throws ProviderError on backend failure (retriable) or on a
    /// dimension/count contract violation (fatal).
    virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;

    EmbeddingVector embed(const std::string& text) { return embed_batch({text})[0]; }
};

double dot(const EmbeddingVector& u, const EmbeddingVector& v);
double l2_norm(const EmbeddingVector& v);

/// (u . v) / (|u| |v|), clamped to [-1, 1]. Throws DegenerateInputError on a
/// zero-norm vector and ValidationError on mismatched dimensions.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

/// Element-wise cosine of each document vector against the query vector.
/// Errors are annotated with the offending 1-based sentence index.
SimilarityProfile similarity_profile(const std::vector<EmbeddingVector>& doc_vectors,
                                     const EmbeddingVector& query_vector,
                                     const std::string& doc_id = "",
                                     const std::string& query_id = "");

/// L2-normalized vector obtained by hashing character trigrams of the
/// lowercased text into dim buckets with a seeded signed hash. Fully
/// deterministic across platforms; texts sharing trigrams score higher
/// against each other than texts with disjoint trigrams.
EmbeddingVector deterministic_test_embed(const std::string& text, std::size_t dim, std::uint64_t seed);

/// In-process provider backed by deterministic_test_embed. No I/O.
class HashingProvider : public EmbeddingProvider {
public:
    explicit HashingProvider(std::size_t dim = 384, std::uint64_t seed = 42);

    std::string name() const override;
    std::size_t dim() const override { return dim_; }
    bool deterministic() const override { return true; }
    bool concurrent_safe() const override { return true; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Stable 64-bit FNV-1a, seedable. Used for the test provider and for cache
/// keys; intentionally not std::hash, which varies across standard libraries.
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);

/// Decorator serializing embed_batch calls to a provider that is not safe
/// for concurrent use.
class SerializedProvider : public EmbeddingProvider {
public:
    explicit SerializedProvider(std::shared_ptr<EmbeddingProvider> inner)
        : inner_(std::move(inner)) {}

    std::string name() const override { return inner_->name(); }
    std::size_t dim() const override { return inner_->dim(); }
    bool deterministic() const override { return inner_->deterministic(); }
    bool concurrent_safe() const override { return true; }
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    std::mutex mutex_;
};

}  // namespace qasc
