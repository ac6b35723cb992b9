#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "qasc/embedding.hpp"

namespace qasc {

/// Append-only persistent store of embedding vectors keyed by a content hash
/// of (provider name, text).
///
/// Record layout, little-endian:
///   u32 key length | key bytes (UTF-8 hex digest) | u32 dim |
///   dim x f32 values | u64 checksum over the preceding fields
///
/// Values are quantized to 32-bit floats on write; get_or_embed returns the
/// quantized values on a miss too, so a cold run and a warm run of the same
/// pipeline produce bitwise-identical results. Appends are single buffered
/// writes, so a reader never observes a torn entry as valid: a truncated or
/// corrupted record fails its checksum and is treated as a miss. Later
/// records override earlier ones with the same key.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::filesystem::path path);

    /// Vectors for all texts, in order. Texts missing from the cache are
    /// embedded through the provider in one batch and persisted.
    std::vector<EmbeddingVector> get_or_embed(EmbeddingProvider& provider,
                                              const std::vector<std::string>& texts);

    std::size_t entry_count() const;
    const std::filesystem::path& path() const { return path_; }

    static std::string content_key(const std::string& provider_name, const std::string& text);

private:
    void load();
    void append_records(const std::vector<std::pair<std::string, EmbeddingVector>>& records);

    std::filesystem::path path_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
    mutable std::mutex mutex_;
};

/// EmbeddingProvider decorator routing embed_batch through a cache.
class CachedProvider : public EmbeddingProvider {
public:
    CachedProvider(std::shared_ptr<EmbeddingCache> cache, std::shared_ptr<EmbeddingProvider> inner)
        : cache_(std::move(cache)), inner_(std::move(inner)) {}

    std::string name() const override { return inner_->name(); }
    std::size_t dim() const override { return inner_->dim(); }
    bool deterministic() const override { return inner_->deterministic(); }
    bool concurrent_safe() const override { return true; }

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        return cache_->get_or_embed(*inner_, texts);
    }

private:
    std::shared_ptr<EmbeddingCache> cache_;
    std::shared_ptr<EmbeddingProvider> inner_;
};

}  // namespace qasc
