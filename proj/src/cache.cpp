#include "qasc/cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace qasc {
namespace {

constexpr std::size_t kMaxKeyBytes = 4096;
constexpr std::size_t kMaxDim = 1u << 20;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(buf, bits);
}

std::uint32_t read_u32(const std::string& buf, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

std::uint64_t read_u64(const std::string& buf, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

float read_f32(const std::string& buf, std::size_t off) {
    const std::uint32_t bits = read_u32(buf, off);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace

std::string EmbeddingCache::content_key(const std::string& provider_name, const std::string& text) {
    std::string material = provider_name;
    material.push_back('\0');
    material += text;
    // Two independent 64-bit digests; collisions across a realistic corpus
    // are negligible at 128 bits.
    const std::uint64_t a = fnv1a64(material.data(), material.size());
    const std::uint64_t b = fnv1a64(material.data(), material.size(), 0xcbf29ce484222325ull ^ 0x5bd1e995u);
    return hex64(a) + hex64(b);
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    load();
}

void EmbeddingCache::load() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // no cache file yet

    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    while (off + 8 <= data.size()) {
        const std::uint32_t key_len = read_u32(data, off);
        if (key_len == 0 || key_len > kMaxKeyBytes) break;  // unrecoverable framing damage
        const std::size_t key_off = off + 4;
        if (key_off + key_len + 4 > data.size()) break;  // truncated tail
        const std::uint32_t dim = read_u32(data, key_off + key_len);
        if (dim == 0 || dim > kMaxDim) break;
        const std::size_t values_off = key_off + key_len + 4;
        const std::size_t record_end = values_off + 4ull * dim + 8;
        if (record_end > data.size()) break;  // truncated tail

        const std::uint64_t want = read_u64(data, record_end - 8);
        const std::uint64_t got = fnv1a64(data.data() + off, record_end - 8 - off);
        if (got == want) {
            EmbeddingVector v(dim);
            for (std::uint32_t i = 0; i < dim; ++i) {
                v[i] = static_cast<double>(read_f32(data, values_off + 4ull * i));
            }
            entries_[data.substr(key_off, key_len)] = std::move(v);
        }
        // checksum failure: skip this record, keep scanning
        off = record_end;
    }
}

void EmbeddingCache::append_records(const std::vector<std::pair<std::string, EmbeddingVector>>& records) {
    std::string buf;
    for (const auto& [key, values] : records) {
        std::string rec;
        put_u32(rec, static_cast<std::uint32_t>(key.size()));
        rec += key;
        put_u32(rec, static_cast<std::uint32_t>(values.size()));
        for (double x : values) put_f32(rec, static_cast<float>(x));
        put_u64(rec, fnv1a64(rec.data(), rec.size()));
        buf += rec;
    }
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open cache file for append: " + path_.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw IoError("cache append failed: " + path_.string());
}

std::size_t EmbeddingCache::entry_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

std::vector<EmbeddingVector> EmbeddingCache::get_or_embed(EmbeddingProvider& provider,
                                                          const std::vector<std::string>& texts) {
    std::vector<std::string> keys;
    keys.reserve(texts.size());
    for (const auto& t : texts) keys.push_back(content_key(provider.name(), t));

    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto it = entries_.find(keys[i]);
            if (it != entries_.end()) {
                out[i] = it->second;
            } else {
                missing.push_back(i);
            }
        }
    }
    if (missing.empty()) return out;

    std::vector<std::string> batch;
    batch.reserve(missing.size());
    for (std::size_t i : missing) batch.push_back(texts[i]);
    std::vector<EmbeddingVector> fresh = provider.embed_batch(batch);
    if (fresh.size() != batch.size()) {
        throw ProviderError("provider returned " + std::to_string(fresh.size()) + " vectors for " +
                                std::to_string(batch.size()) + " texts",
                            /*retriable=*/false, batch.size());
    }

    // Quantize through the 32-bit storage format before returning, so the
    // values handed out on a miss match what later hits will read back.
    std::vector<std::pair<std::string, EmbeddingVector>> records;
    records.reserve(missing.size());
    for (std::size_t j = 0; j < missing.size(); ++j) {
        EmbeddingVector quantized(fresh[j].size());
        for (std::size_t k = 0; k < fresh[j].size(); ++k) {
            quantized[k] = static_cast<double>(static_cast<float>(fresh[j][k]));
        }
        out[missing[j]] = quantized;
        records.emplace_back(keys[missing[j]], std::move(quantized));
    }

    {
        std::lock_guard<std::mutex> lock(mutex_);
        append_records(records);
        for (auto& [key, values] : records) entries_[key] = std::move(values);
    }
    return out;
}

}  // namespace qasc
