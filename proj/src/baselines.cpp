#include "qasc/baselines.hpp"

#include <algorithm>
#include <cctype>

#include "qasc/chunking.hpp"
#include "qasc/errors.hpp"

namespace qasc::baselines {
namespace {

struct TokenRef {
    std::size_t begin = 0;
    std::size_t end = 0;
    int sentence = 0;
};

std::vector<TokenRef> tokenize(const Document& doc) {
    std::vector<TokenRef> tokens;
    for (const Sentence& s : doc.sentences) {
        std::size_t i = s.begin;
        while (i < s.end) {
            while (i < s.end && std::isspace(static_cast<unsigned char>(doc.raw_text[i]))) ++i;
            if (i >= s.end) break;
            std::size_t j = i;
            while (j < s.end && !std::isspace(static_cast<unsigned char>(doc.raw_text[j]))) ++j;
            tokens.push_back({i, j, s.index});
            i = j;
        }
    }
    return tokens;
}

BaselineChunk make_chunk(const Document& doc, const std::vector<TokenRef>& tokens,
                         std::size_t first, std::size_t last_exclusive) {
    BaselineChunk chunk;
    chunk.start_sentence = tokens[first].sentence;
    chunk.end_sentence = tokens[last_exclusive - 1].sentence;
    chunk.char_begin = tokens[first].begin;
    chunk.char_end = tokens[last_exclusive - 1].end;
    chunk.token_count = static_cast<int>(last_exclusive - first);
    chunk.text = doc.raw_text.substr(chunk.char_begin, chunk.char_end - chunk.char_begin);
    return chunk;
}

// Sentence index ranges [first, last] of each paragraph, in order.
std::vector<std::pair<int, int>> paragraph_sentence_ranges(const Document& doc) {
    std::vector<std::pair<int, int>> ranges;
    std::vector<int> starts(doc.paragraph_starts.begin(), doc.paragraph_starts.end());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const int first = starts[i];
        const int last = i + 1 < starts.size() ? starts[i + 1] - 1 : doc.sentence_count();
        ranges.emplace_back(first, last);
    }
    return ranges;
}

}  // namespace

void BaselineConfig::validate() const {
    if (fixed_size_tokens < 1) throw ValidationError("fixed_size_tokens must be positive");
    if (recursive_target_tokens < 1) throw ValidationError("recursive_target_tokens must be positive");
    if (recursive_overlap_tokens < 0 || recursive_overlap_tokens >= recursive_target_tokens) {
        throw ValidationError("recursive overlap must satisfy 0 <= overlap < target");
    }
    if (!(semantic_boundary_percentile >= 0.0 && semantic_boundary_percentile <= 100.0)) {
        throw ValidationError("semantic_boundary_percentile must lie in [0, 100]");
    }
}

std::vector<BaselineChunk> chunk_fixed(const Document& doc, int size_tokens) {
    if (size_tokens < 1) throw ValidationError("chunk_fixed: size_tokens must be positive");
    const std::vector<TokenRef> tokens = tokenize(doc);

    std::vector<BaselineChunk> chunks;
    const auto size = static_cast<std::size_t>(size_tokens);
    for (std::size_t first = 0; first < tokens.size(); first += size) {
        chunks.push_back(make_chunk(doc, tokens, first, std::min(first + size, tokens.size())));
    }
    return chunks;
}

std::vector<BaselineChunk> chunk_recursive(const Document& doc, int target_tokens,
                                           int overlap_tokens) {
    if (target_tokens < 1) throw ValidationError("chunk_recursive: target must be positive");
    if (overlap_tokens < 0 || overlap_tokens >= target_tokens) {
        throw ValidationError("chunk_recursive: overlap must satisfy 0 <= overlap < target");
    }

    const std::vector<TokenRef> tokens = tokenize(doc);
    if (tokens.empty()) return {};

    // First token index of each sentence (1-based sentence -> token offset).
    std::vector<std::size_t> sentence_first_token(static_cast<std::size_t>(doc.sentence_count()) + 1,
                                                  tokens.size());
    for (std::size_t t = tokens.size(); t-- > 0;) {
        sentence_first_token[static_cast<std::size_t>(tokens[t].sentence)] = t;
    }
    auto sentence_token_range = [&](int first_sentence, int last_sentence) {
        const std::size_t begin = sentence_first_token[static_cast<std::size_t>(first_sentence)];
        const std::size_t end = last_sentence < doc.sentence_count()
                                    ? sentence_first_token[static_cast<std::size_t>(last_sentence) + 1]
                                    : tokens.size();
        return std::pair<std::size_t, std::size_t>{begin, end};
    };

    const auto target = static_cast<std::size_t>(target_tokens);
    std::vector<std::pair<std::size_t, std::size_t>> pieces;  // token ranges partitioning the stream

    for (const auto& [para_first, para_last] : paragraph_sentence_ranges(doc)) {
        const auto [para_begin, para_end] = sentence_token_range(para_first, para_last);
        if (para_end - para_begin <= target) {
            pieces.emplace_back(para_begin, para_end);
            continue;
        }
        // Paragraph over target: greedy sentence packing.
        std::size_t pack_begin = para_begin;
        for (int s = para_first; s <= para_last; ++s) {
            const auto [s_begin, s_end] = sentence_token_range(s, s);
            if (s_end - s_begin > target) {
                // Oversized sentence: flush the pack, then word-level runs.
                if (s_begin > pack_begin) pieces.emplace_back(pack_begin, s_begin);
                for (std::size_t w = s_begin; w < s_end; w += target) {
                    pieces.emplace_back(w, std::min(w + target, s_end));
                }
                pack_begin = s_end;
            } else if (s_end - pack_begin > target) {
                pieces.emplace_back(pack_begin, s_begin);
                pack_begin = s_begin;
            }
        }
        const std::size_t para_token_end = sentence_token_range(para_first, para_last).second;
        if (pack_begin < para_token_end) pieces.emplace_back(pack_begin, para_token_end);
    }

    std::vector<BaselineChunk> chunks;
    chunks.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        std::size_t begin = pieces[i].first;
        if (i > 0 && overlap_tokens > 0) {
            const std::size_t prev_count = pieces[i - 1].second - pieces[i - 1].first;
            begin -= std::min<std::size_t>(static_cast<std::size_t>(overlap_tokens), prev_count);
        }
        chunks.push_back(make_chunk(doc, tokens, begin, pieces[i].second));
    }
    return chunks;
}

std::vector<BaselineChunk> chunk_semantic(const Document& doc, EmbeddingProvider& provider,
                                          double boundary_percentile) {
    const int n = doc.sentence_count();
    if (n == 0) return {};

    std::vector<std::pair<int, int>> runs;
    if (n == 1) {
        runs.emplace_back(1, 1);
    } else {
        std::vector<std::string> texts;
        texts.reserve(doc.sentences.size());
        for (const auto& s : doc.sentences) texts.push_back(s.text);
        const std::vector<EmbeddingVector> vectors = provider.embed_batch(texts);

        std::vector<double> adjacent(static_cast<std::size_t>(n) - 1);
        for (int i = 1; i < n; ++i) {
            adjacent[static_cast<std::size_t>(i - 1)] =
                cosine_similarity(vectors[static_cast<std::size_t>(i - 1)],
                                  vectors[static_cast<std::size_t>(i)]);
        }
        const double threshold = percentile(adjacent, boundary_percentile);

        int run_first = 1;
        for (int i = 1; i < n; ++i) {
            if (adjacent[static_cast<std::size_t>(i - 1)] < threshold) {
                runs.emplace_back(run_first, i);
                run_first = i + 1;
            }
        }
        runs.emplace_back(run_first, n);
    }

    std::vector<BaselineChunk> chunks;
    chunks.reserve(runs.size());
    for (const auto& [first, last] : runs) {
        BaselineChunk chunk;
        chunk.start_sentence = first;
        chunk.end_sentence = last;
        chunk.char_begin = doc.sentence(first).begin;
        chunk.char_end = doc.sentence(last).end;
        chunk.text = span_text(doc, first, last);
        chunk.token_count = 0;
        for (int s = first; s <= last; ++s) chunk.token_count += doc.sentence(s).token_count;
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

std::vector<BaselineChunk> chunk_with(const Document& doc, const BaselineConfig& config,
                                      EmbeddingProvider& provider) {
    config.validate();
    switch (config.strategy) {
        case Strategy::fixed:
            return chunk_fixed(doc, config.fixed_size_tokens);
        case Strategy::recursive:
            return chunk_recursive(doc, config.recursive_target_tokens,
                                   config.recursive_overlap_tokens);
        case Strategy::semantic:
            return chunk_semantic(doc, provider, config.semantic_boundary_percentile);
    }
    throw ValidationError("unknown baseline strategy");
}

}  // namespace qasc::baselines
