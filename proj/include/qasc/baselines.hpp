#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qasc/embedding.hpp"
#include "qasc/segmenter.hpp"

namespace qasc::baselines {

enum class Strategy { fixed, recursive, semantic };

struct BaselineConfig {
    Strategy strategy = Strategy::fixed;
    int fixed_size_tokens = 500;
    int recursive_target_tokens = 500;
    int recursive_overlap_tokens = 50;
    double semantic_boundary_percentile = 25.0;

    void validate() const;
};

/// A query-agnostic chunk. Fixed and recursive chunks are token spans and
/// may sever sentences; start/end_sentence give the range of sentences the
/// chunk intersects. char_begin/char_end is the chunk text's byte span in
/// the document's raw text (for recursive chunks this includes the
/// prepended overlap tokens).
struct BaselineChunk {
    int start_sentence = 0;
    int end_sentence = 0;
    std::size_t char_begin = 0;
    std::size_t char_end = 0;
    int token_count = 0;
    std::string text;
};

/// Cuts the document's whitespace-token stream every size_tokens tokens; the
/// final chunk holds the remainder. A document with no tokens yields no
/// chunks.
std::vector<BaselineChunk> chunk_fixed(const Document& doc, int size_tokens);

/// Splits on paragraph breaks first; any piece over the target splits on
/// sentence boundaries (greedy left-to-right packing); any single sentence
/// still over the target splits on word boundaries into runs of at most
/// target tokens. Consecutive chunks then share the trailing
/// overlap_tokens of the predecessor, prepended to the successor.
std::vector<BaselineChunk> chunk_recursive(const Document& doc, int target_tokens,
                                           int overlap_tokens);

/// Embedding-based boundaries: with adjacent-sentence similarities
/// d_1..d_{n-1} and t the boundary_percentile of d, a boundary is placed
/// after sentence i wherever d_i < t (strict, so a constant-similarity
/// document is never fragmented). A one-sentence document is one chunk.
std::vector<BaselineChunk> chunk_semantic(const Document& doc, EmbeddingProvider& provider,
                                          double boundary_percentile = 25.0);

std::vector<BaselineChunk> chunk_with(const Document& doc, const BaselineConfig& config,
                                      EmbeddingProvider& provider);

}  // namespace qasc::baselines
