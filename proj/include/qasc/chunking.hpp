#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qasc/config.hpp"
#include "qasc/embedding.hpp"
#include "qasc/segmenter.hpp"

namespace qasc {

struct Seed {
    int index = 0;
    double score = 0.0;
};

/// Seeds selected from one similarity profile, in ascending sentence order,
/// all scoring at least `threshold`.
struct SeedSet {
    double threshold = 0.0;
    std::vector<Seed> seeds;

    bool contains(int index) const;
};

/// Inclusive 1-based sentence span.
struct SentenceSpan {
    int first = 0;
    int last = 0;

    int length() const { return last - first + 1; }
    bool operator==(const SentenceSpan&) const = default;
};

struct CandidateChunk {
    SentenceSpan span;
    std::vector<int> seed_indices;  // ascending, all within span
    double aggregate_score = 0.0;
    /// (backward, forward) expansion radii; set for single-seed adaptive
    /// windows, cleared once candidates are combined.
    std::optional<std::pair<int, int>> adaptive_radii;
};

/// Final chunking result: sorted, non-overlapping chunks whose pairwise gaps
/// exceed the merge gap tolerance.
struct ChunkSet {
    std::string doc_id;
    std::string query_id;
    std::vector<CandidateChunk> chunks;
};

/// Linear-interpolation percentile: with values sorted ascending into
/// v[0..n-1] and rank = (p/100)*(n-1), returns
/// v[floor(rank)] + frac(rank) * (v[floor(rank)+1] - v[floor(rank)]).
/// Throws DegenerateInputError on empty input, ValidationError on p outside
/// [0, 100].
double percentile(std::vector<double> values, double p);

/// Seeds are all sentences whose score is >= the p-th percentile of the
/// profile (inclusive); at least one seed always exists.
SeedSet select_seeds(const SimilarityProfile& profile, double p);

/// The k highest-scoring sentences; ties at the cutoff score are broken in
/// favor of the lower sentence index. Reported threshold is the lowest
/// selected score. Throws ValidationError unless 1 <= k <= n.
SeedSet select_seeds_topk(const SimilarityProfile& profile, int k);

/// [max(1, seed - radius), min(n, seed + radius)].
SentenceSpan expand_window_fixed(int seed, int radius, int sentence_count);

/// Expands outward from the seed while neighbors score >= boundary_threshold,
/// stopping at the first sentence below it or at the document edge. A seed
/// whose immediate neighbor falls below the threshold gets radius 0 on that
/// side.
SentenceSpan expand_window_adaptive(int seed, const SimilarityProfile& profile,
                                    double boundary_threshold);

/// exp(-decay * |i - seed|) for each sentence i in the span; the seed's own
/// weight is exactly 1.
std::vector<double> positional_weights(SentenceSpan span, int seed, double decay);

/// Per-sentence max of the single-seed weights over all of the chunk's
/// seeds; reduces to positional_weights for a single seed.
std::vector<double> multi_seed_weights(SentenceSpan span, const std::vector<int>& seeds,
                                       double decay);

/// Weighted mean of the profile scores over the span.
double aggregate_score(SentenceSpan span, const SimilarityProfile& profile,
                       const std::vector<double>& weights);

/// Retains exactly the candidates whose aggregate score is
/// >= threshold_factor * seed_threshold.
std::vector<CandidateChunk> filter_candidates(std::vector<CandidateChunk> candidates,
                                              double seed_threshold, double threshold_factor);

/// Repeatedly merges adjacent candidates whose gap (next.first - prev.last)
/// is <= gap_tolerance until no merge applies, unioning seed sets and
/// recomputing the aggregate score over each merged span with multi-seed
/// weights. Candidates must be sorted by span start.
ChunkSet merge_chunks(std::vector<CandidateChunk> candidates, int gap_tolerance,
                      const SimilarityProfile& profile, double decay);

/// Moves chunk boundaries onto paragraph breaks within max_shift sentences.
///
/// A chunk start is aligned when it is a paragraph start; a chunk end is
/// aligned when the next sentence starts a paragraph or the chunk ends the
/// document. An unaligned boundary moves to the nearest aligned position in
/// range, preferring the smaller shift and, on a distance tie, the shift
/// that shrinks the chunk. A shift is suppressed if it would empty the
/// chunk, overlap a neighbor, reduce a neighbor gap below the merge
/// tolerance, or strip the chunk of its last seed. Seeds left outside a
/// shifted span are dropped and aggregate scores are recomputed.
ChunkSet adjust_boundaries(ChunkSet chunks, const Document& doc, int max_shift,
                           const SimilarityProfile& profile, double decay,
                           int gap_tolerance);

/// Full pipeline on a precomputed similarity profile: threshold, seeds,
/// windows, weighted scoring, filtering, merging, boundary adjustment.
/// Duplicate spans produced by distinct seeds are collapsed (seed sets
/// unioned) before scoring. An empty result is legal: a document with no
/// passage related to the query may yield zero chunks.
ChunkSet run_qasc_on_profile(const Document& doc, const SimilarityProfile& profile,
                             const QascConfig& config);

/// Embeds the document sentences and the query through the provider, builds
/// the similarity profile and runs the pipeline.
ChunkSet run_qasc(const Document& doc, const std::string& query_text,
                  EmbeddingProvider& provider, const QascConfig& config,
                  const std::string& query_id = "");

/// Mode 2 output: chunk texts concatenated in document order. Chunks that
/// are adjacent in the document are joined with a single space; a gap of one
/// or more omitted sentences is marked with " [...] ". An empty chunk set
/// yields an empty string.
std::string compose_summary(const ChunkSet& chunks, const Document& doc);

}  // namespace qasc
