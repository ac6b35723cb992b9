#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qasc/baselines.hpp"
#include "qasc/chunking.hpp"
#include "qasc/config.hpp"
#include "qasc/embedding.hpp"
#include "qasc/segmenter.hpp"

namespace qasc::eval {

/// Human-marked sentence indices required to answer a query in one document.
struct GoldAnnotation {
    std::string query_id;
    std::string doc_id;
    std::set<int> relevant_sentences;
};

struct Query {
    std::string id;
    std::string text;
    std::string type;  // factoid | topical | comparative | multi_hop
};

struct RetrievalConfig {
    int top_k = 5;
};

/// Strategy-agnostic chunk view used for indexing, retrieval and relevance
/// judgment.
struct RetrievalChunk {
    int start_sentence = 0;
    int end_sentence = 0;
    std::string text;
    double producer_score = 0.0;
};

struct RankedChunk {
    std::size_t chunk_index = 0;  // position within the full chunk list
    double similarity = 0.0;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct StageTimings {
    double chunking_ms = 0.0;
    double retrieval_ms = 0.0;

    double total_ms() const { return chunking_ms + retrieval_ms; }
};

struct LatencyReport {
    std::size_t query_count = 0;
    StageTimings total;
    StageTimings mean;
};

/// Exact top-k retrieval by inner product over L2-normalized embeddings of
/// the chunk texts (embedded through the provider) against the normalized
/// query vector. Ranked descending; ties broken by lower chunk start
/// sentence, then lower end sentence, then input order. Returns all chunks
/// when fewer than k exist.
std::vector<RankedChunk> index_and_retrieve(const std::vector<RetrievalChunk>& chunks,
                                            const EmbeddingVector& query_vector,
                                            EmbeddingProvider& provider, int k);

/// True iff the chunk's sentence range intersects the gold sentences.
bool judge_relevance(const RetrievalChunk& chunk, const GoldAnnotation& gold);

/// precision = relevant retrieved / retrieved (0 when nothing retrieved);
/// recall = relevant retrieved / relevant available within all_chunks
/// (0 when no relevant chunk exists); f1 = harmonic mean, 0 when both are 0.
Metrics compute_metrics(const std::vector<RankedChunk>& retrieved,
                        const std::vector<RetrievalChunk>& all_chunks,
                        const GoldAnnotation& gold);

/// Per-stage totals and per-query means. An empty run yields an all-zero
/// report.
LatencyReport measure_latency(const std::vector<StageTimings>& per_query);

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

/// One chunking strategy under evaluation, parsed from specs like "qasc",
/// "fixed:500", "recursive:500:50", "semantic:25".
struct StrategySpec {
    std::string label;
    bool is_qasc = false;
    baselines::BaselineConfig baseline;

    static StrategySpec parse(const std::string& spec);
};

struct EvalOptions {
    RetrievalConfig retrieval;
    QascConfig qasc;
    bool timing = true;  // false writes zero latencies, making reports byte-reproducible
    int jobs = 1;
};

/// Outcome of one strategy on one gold-annotated (query, document) pair:
/// the ranked retrieval, the relevance metrics against gold, the size of the
/// chunk universe (the recall denominator is relative to it) and the stage
/// latencies.
struct CaseOutcome {
    std::string strategy;
    std::string query_id;
    std::string query_type;
    std::string doc_id;
    std::vector<RankedChunk> retrieved;
    Metrics metrics;
    std::size_t chunk_count = 0;
    std::size_t relevant_available = 0;
    StageTimings timings;
};

/// One CSV row: a strategy evaluated on one query, averaged over the query's
/// gold-annotated documents.
struct EvalRow {
    std::string strategy;
    std::string query_id;
    std::string query_type;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double chunk_count = 0.0;
    double relevant_available = 0.0;
    StageTimings latency;
};

/// Validates gold records against the corpus and queries: unknown ids and
/// out-of-range sentence indices are collected and reported together in one
/// ValidationError before any evaluation work.
void validate_inputs(const std::vector<Document>& corpus, const std::vector<Query>& queries,
                     const std::vector<GoldAnnotation>& gold);

/// Runs every strategy over every gold-annotated (query, document) pair:
/// chunk the document (query-conditioned for qasc), retrieve top-k from that
/// document's chunks, judge against gold. Outcomes follow strategy order,
/// then query input order.
std::vector<CaseOutcome> run_cases(const std::vector<Document>& corpus,
                                   const std::vector<Query>& queries,
                                   const std::vector<GoldAnnotation>& gold,
                                   const std::vector<StrategySpec>& strategies,
                                   EmbeddingProvider& provider, const EvalOptions& options);

/// Collapses case outcomes into one row per (strategy, query), averaging
/// over the query's gold-annotated documents.
std::vector<EvalRow> collapse_rows(const std::vector<CaseOutcome>& outcomes,
                                   const std::vector<Query>& queries);

std::vector<EvalRow> run_evaluation(const std::vector<Document>& corpus,
                                    const std::vector<Query>& queries,
                                    const std::vector<GoldAnnotation>& gold,
                                    const std::vector<StrategySpec>& strategies,
                                    EmbeddingProvider& provider, const EvalOptions& options);

/// Table-driven one-at-a-time hyperparameter sweep of the qasc strategy.
/// Each grid point re-runs the evaluation with a single parameter changed
/// from the base config. Failures at one point are recorded and do not abort
/// the sweep.
struct SweepAxis {
    std::string name;  // p | m | lambda | g | beta
    std::vector<double> values;
};

struct SweepRow {
    std::string axis;
    double value = 0.0;
    EvalRow row;          // per-query row, or the per-point aggregate
    bool aggregate = false;
    std::string error;    // non-empty when this grid point failed
};

/// The five sweep axes with their standard value grids.
std::vector<SweepAxis> default_sweep_axes();

std::vector<SweepRow> sweep_hyperparameters(const std::vector<Document>& corpus,
                                            const std::vector<Query>& queries,
                                            const std::vector<GoldAnnotation>& gold,
                                            const std::vector<SweepAxis>& axes,
                                            EmbeddingProvider& provider,
                                            const EvalOptions& options);

// Report writers. CSV columns: strategy, query_id, query_type, precision,
// recall, f1, chunk_count, latency_chunking_ms, latency_retrieval_ms.
std::string report_csv(const std::vector<EvalRow>& rows);
std::string summary_json(const std::vector<EvalRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace qasc::eval
