#include "qasc/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace qasc {

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

double dot(const EmbeddingVector& u, const EmbeddingVector& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
}

double l2_norm(const EmbeddingVector& v) {
    return std::sqrt(dot(v, v));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.size() != v.size()) {
        throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(u.size()) +
                              " vs " + std::to_string(v.size()) + ")");
    }
    const double nu = l2_norm(u);
    const double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw DegenerateInputError("cosine_similarity: zero-norm vector");
    }
    return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

SimilarityProfile similarity_profile(const std::vector<EmbeddingVector>& doc_vectors,
                                     const EmbeddingVector& query_vector,
                                     const std::string& doc_id,
                                     const std::string& query_id) {
    if (doc_vectors.empty()) {
        throw ValidationError("similarity_profile: no document vectors");
    }
    SimilarityProfile profile;
    profile.doc_id = doc_id;
    profile.query_id = query_id;
    profile.scores.reserve(doc_vectors.size());
    for (std::size_t i = 0; i < doc_vectors.size(); ++i) {
        try {
            profile.scores.push_back(cosine_similarity(doc_vectors[i], query_vector));
        } catch (const Error& e) {
            throw DegenerateInputError("similarity_profile: sentence " + std::to_string(i + 1) +
                                       ": " + e.what());
        }
    }
    return profile;
}

EmbeddingVector deterministic_test_embed(const std::string& text, std::size_t dim, std::uint64_t seed) {
    EmbeddingVector v(dim, 0.0);

    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    const std::size_t len = lowered.size();
    const std::size_t grams = len > 2 ? len - 2 : 1;
    for (std::size_t i = 0; i < grams; ++i) {
        const std::size_t remaining = len > i ? len - i : 0;
        const std::size_t gram_len = std::min<std::size_t>(3, remaining);
        const std::uint64_t h = fnv1a64(lowered.data() + i, gram_len, seed ^ 0x9e3779b97f4a7c15ull);
        const std::size_t bucket = static_cast<std::size_t>(h % dim);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[bucket] += sign;
    }

    const double norm = l2_norm(v);
    if (norm > 0.0) {
        for (double& x : v) x /= norm;
    } else {
        // All contributions cancelled; fall back to a deterministic unit vector.
        v[static_cast<std::size_t>(fnv1a64(lowered.data(), lowered.size(), seed) % dim)] = 1.0;
    }
    return v;
}

HashingProvider::HashingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw ValidationError("HashingProvider: dim must be positive");
}

std::string HashingProvider::name() const {
    return "hash-trigram-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

std::vector<EmbeddingVector> HashingProvider::embed_batch(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(deterministic_test_embed(t, dim_, seed_));
    return out;
}

std::vector<EmbeddingVector> SerializedProvider::embed_batch(const std::vector<std::string>& texts) {
    std::lock_guard<std::mutex> lock(mutex_);
    return inner_->embed_batch(texts);
}

}  // namespace qasc
