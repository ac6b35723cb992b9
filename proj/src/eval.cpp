#include "qasc/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "qasc/errors.hpp"
#include "qasc/parallel.hpp"

namespace qasc::eval {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

EmbeddingVector normalized(EmbeddingVector v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) throw DegenerateInputError("retrieval: zero-norm embedding");
    for (double& x : v) x /= norm;
    return v;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::vector<RetrievalChunk> as_retrieval_chunks(const ChunkSet& set, const Document& doc) {
    std::vector<RetrievalChunk> out;
    out.reserve(set.chunks.size());
    for (const auto& c : set.chunks) {
        out.push_back({c.span.first, c.span.last, span_text(doc, c.span.first, c.span.last),
                       c.aggregate_score});
    }
    return out;
}

std::vector<RetrievalChunk> as_retrieval_chunks(const std::vector<baselines::BaselineChunk>& chunks) {
    std::vector<RetrievalChunk> out;
    out.reserve(chunks.size());
    for (const auto& c : chunks) out.push_back({c.start_sentence, c.end_sentence, c.text, 0.0});
    return out;
}

}  // namespace

std::vector<RankedChunk> index_and_retrieve(const std::vector<RetrievalChunk>& chunks,
                                            const EmbeddingVector& query_vector,
                                            EmbeddingProvider& provider, int k) {
    if (k < 1) throw ValidationError("index_and_retrieve: k must be positive");
    if (chunks.empty()) throw ValidationError("index_and_retrieve: no chunks to index");

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);
    const std::vector<EmbeddingVector> raw = provider.embed_batch(texts);

    const EmbeddingVector query = normalized(query_vector);
    std::vector<RankedChunk> ranked;
    ranked.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        ranked.push_back({i, dot(normalized(raw[i]), query)});
    }

    std::sort(ranked.begin(), ranked.end(), [&](const RankedChunk& a, const RankedChunk& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        const auto& ca = chunks[a.chunk_index];
        const auto& cb = chunks[b.chunk_index];
        if (ca.start_sentence != cb.start_sentence) return ca.start_sentence < cb.start_sentence;
        if (ca.end_sentence != cb.end_sentence) return ca.end_sentence < cb.end_sentence;
        return a.chunk_index < b.chunk_index;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

bool judge_relevance(const RetrievalChunk& chunk, const GoldAnnotation& gold) {
    auto it = gold.relevant_sentences.lower_bound(chunk.start_sentence);
    return it != gold.relevant_sentences.end() && *it <= chunk.end_sentence;
}

Metrics compute_metrics(const std::vector<RankedChunk>& retrieved,
                        const std::vector<RetrievalChunk>& all_chunks,
                        const GoldAnnotation& gold) {
    std::size_t relevant_retrieved = 0;
    for (const auto& r : retrieved) {
        if (judge_relevance(all_chunks[r.chunk_index], gold)) ++relevant_retrieved;
    }
    std::size_t relevant_available = 0;
    for (const auto& c : all_chunks) {
        if (judge_relevance(c, gold)) ++relevant_available;
    }

    Metrics m;
    m.precision = retrieved.empty()
                      ? 0.0
                      : static_cast<double>(relevant_retrieved) / static_cast<double>(retrieved.size());
    m.recall = relevant_available == 0 ? 0.0
                                       : static_cast<double>(relevant_retrieved) /
                                             static_cast<double>(relevant_available);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

LatencyReport measure_latency(const std::vector<StageTimings>& per_query) {
    LatencyReport report;
    report.query_count = per_query.size();
    for (const auto& t : per_query) {
        report.total.chunking_ms += t.chunking_ms;
        report.total.retrieval_ms += t.retrieval_ms;
    }
    if (!per_query.empty()) {
        const auto n = static_cast<double>(per_query.size());
        report.mean.chunking_ms = report.total.chunking_ms / n;
        report.mean.retrieval_ms = report.total.retrieval_ms / n;
    }
    return report;
}

StrategySpec StrategySpec::parse(const std::string& spec) {
    StrategySpec out;
    out.label = spec;

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t colon = spec.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.empty() || parts[0].empty()) throw ValidationError("empty strategy spec");

    auto as_int = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("strategy spec \"" + spec + "\": invalid integer \"" + s + "\"");
        }
    };
    auto as_double = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("strategy spec \"" + spec + "\": invalid number \"" + s + "\"");
        }
    };

    const std::string& kind = parts[0];
    if (kind == "qasc") {
        if (parts.size() > 1) throw ValidationError("strategy \"qasc\" takes no parameters");
        out.is_qasc = true;
    } else if (kind == "fixed") {
        out.baseline.strategy = baselines::Strategy::fixed;
        if (parts.size() > 2) throw ValidationError("strategy \"fixed\" takes at most one parameter");
        if (parts.size() == 2) out.baseline.fixed_size_tokens = as_int(parts[1]);
    } else if (kind == "recursive") {
        out.baseline.strategy = baselines::Strategy::recursive;
        if (parts.size() > 3) throw ValidationError("strategy \"recursive\" takes at most two parameters");
        if (parts.size() >= 2) out.baseline.recursive_target_tokens = as_int(parts[1]);
        if (parts.size() == 3) out.baseline.recursive_overlap_tokens = as_int(parts[2]);
    } else if (kind == "semantic") {
        out.baseline.strategy = baselines::Strategy::semantic;
        if (parts.size() > 2) throw ValidationError("strategy \"semantic\" takes at most one parameter");
        if (parts.size() == 2) out.baseline.semantic_boundary_percentile = as_double(parts[1]);
    } else {
        throw ValidationError("unknown strategy \"" + kind +
                              "\" (expected qasc, fixed, recursive or semantic)");
    }
    if (!out.is_qasc) out.baseline.validate();
    return out;
}

void validate_inputs(const std::vector<Document>& corpus, const std::vector<Query>& queries,
                     const std::vector<GoldAnnotation>& gold) {
    std::unordered_map<std::string, const Document*> docs;
    for (const auto& d : corpus) docs[d.id] = &d;
    std::set<std::string> query_ids;
    for (const auto& q : queries) query_ids.insert(q.id);

    std::vector<std::string> offenders;
    for (const auto& g : gold) {
        if (!query_ids.count(g.query_id)) {
            offenders.push_back("gold references unknown query id \"" + g.query_id + "\"");
        }
        auto it = docs.find(g.doc_id);
        if (it == docs.end()) {
            offenders.push_back("gold references unknown doc id \"" + g.doc_id + "\"");
            continue;
        }
        if (g.relevant_sentences.empty()) {
            offenders.push_back("gold for query \"" + g.query_id + "\" doc \"" + g.doc_id +
                                "\" has no relevant sentences");
            continue;
        }
        const int n = it->second->sentence_count();
        for (int s : g.relevant_sentences) {
            if (s < 1 || s > n) {
                offenders.push_back("gold for query \"" + g.query_id + "\" doc \"" + g.doc_id +
                                    "\" references sentence " + std::to_string(s) +
                                    " outside 1.." + std::to_string(n));
            }
        }
    }
    if (!offenders.empty()) {
        std::string message = "invalid gold annotations:";
        for (const auto& o : offenders) message += "\n  - " + o;
        throw ValidationError(message);
    }
}

std::vector<CaseOutcome> run_cases(const std::vector<Document>& corpus,
                                   const std::vector<Query>& queries,
                                   const std::vector<GoldAnnotation>& gold,
                                   const std::vector<StrategySpec>& strategies,
                                   EmbeddingProvider& provider, const EvalOptions& options) {
    options.qasc.validate();
    if (options.retrieval.top_k < 1) throw ValidationError("top_k must be positive");
    if (strategies.empty()) throw ValidationError("no strategies selected");
    validate_inputs(corpus, queries, gold);

    std::unordered_map<std::string, const Document*> docs;
    for (const auto& d : corpus) docs[d.id] = &d;

    struct Case {
        const Query* query;
        const Document* doc;
        const GoldAnnotation* gold;
    };
    std::vector<Case> cases;
    for (const auto& q : queries) {
        for (const auto& g : gold) {
            if (g.query_id == q.id) cases.push_back({&q, docs.at(g.doc_id), &g});
        }
    }

    std::shared_ptr<EmbeddingProvider> shared;
    EmbeddingProvider* active = &provider;
    if (options.jobs > 1 && !provider.concurrent_safe()) {
        shared = std::make_shared<SerializedProvider>(
            std::shared_ptr<EmbeddingProvider>(&provider, [](EmbeddingProvider*) {}));
        active = shared.get();
    }

    std::vector<CaseOutcome> outcomes;
    for (const auto& strategy : strategies) {
        // Baselines are query-agnostic: chunk each document once and reuse.
        std::unordered_map<std::string, std::pair<std::vector<RetrievalChunk>, double>> doc_chunks;
        if (!strategy.is_qasc) {
            for (const auto& kase : cases) {
                if (doc_chunks.count(kase.doc->id)) continue;
                const auto start = Clock::now();
                auto chunks =
                    as_retrieval_chunks(baselines::chunk_with(*kase.doc, strategy.baseline, *active));
                const double ms = options.timing ? elapsed_ms(start) : 0.0;
                doc_chunks.emplace(kase.doc->id, std::make_pair(std::move(chunks), ms));
            }
        }

        std::vector<CaseOutcome> results(cases.size());
        parallel_for(cases.size(), options.jobs, [&](std::size_t i) {
            const Case& kase = cases[i];
            CaseOutcome& result = results[i];
            result.strategy = strategy.label;
            result.query_id = kase.query->id;
            result.query_type = kase.query->type;
            result.doc_id = kase.doc->id;

            std::vector<RetrievalChunk> chunks;
            if (strategy.is_qasc) {
                const auto start = Clock::now();
                const ChunkSet set =
                    run_qasc(*kase.doc, kase.query->text, *active, options.qasc, kase.query->id);
                if (options.timing) result.timings.chunking_ms = elapsed_ms(start);
                chunks = as_retrieval_chunks(set, *kase.doc);
            } else {
                const auto& [cached, ms] = doc_chunks.at(kase.doc->id);
                chunks = cached;
                result.timings.chunking_ms = ms;
            }
            result.chunk_count = chunks.size();
            for (const auto& c : chunks) {
                if (judge_relevance(c, *kase.gold)) ++result.relevant_available;
            }

            if (!chunks.empty()) {
                const auto start = Clock::now();
                const EmbeddingVector query_vector = active->embed(kase.query->text);
                result.retrieved =
                    index_and_retrieve(chunks, query_vector, *active, options.retrieval.top_k);
                if (options.timing) result.timings.retrieval_ms = elapsed_ms(start);
                result.metrics = compute_metrics(result.retrieved, chunks, *kase.gold);
            }
            // No chunks at all: nothing retrieved, precision/recall/f1 = 0.
        });
        for (auto& r : results) outcomes.push_back(std::move(r));
    }
    return outcomes;
}

std::vector<EvalRow> collapse_rows(const std::vector<CaseOutcome>& outcomes,
                                   const std::vector<Query>& queries) {
    std::vector<EvalRow> rows;
    std::vector<std::string> strategy_order;
    for (const auto& o : outcomes) {
        if (std::find(strategy_order.begin(), strategy_order.end(), o.strategy) ==
            strategy_order.end()) {
            strategy_order.push_back(o.strategy);
        }
    }

    for (const auto& strategy : strategy_order) {
        for (const auto& q : queries) {
            std::size_t count = 0;
            EvalRow row;
            row.strategy = strategy;
            row.query_id = q.id;
            row.query_type = q.type;
            for (const auto& o : outcomes) {
                if (o.strategy != strategy || o.query_id != q.id) continue;
                ++count;
                row.precision += o.metrics.precision;
                row.recall += o.metrics.recall;
                row.f1 += o.metrics.f1;
                row.chunk_count += static_cast<double>(o.chunk_count);
                row.relevant_available += static_cast<double>(o.relevant_available);
                row.latency.chunking_ms += o.timings.chunking_ms;
                row.latency.retrieval_ms += o.timings.retrieval_ms;
            }
            if (count == 0) continue;  // query has no gold annotation
            const auto n = static_cast<double>(count);
            row.precision /= n;
            row.recall /= n;
            row.f1 /= n;
            row.chunk_count /= n;
            row.relevant_available /= n;
            row.latency.chunking_ms /= n;
            row.latency.retrieval_ms /= n;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<EvalRow> run_evaluation(const std::vector<Document>& corpus,
                                    const std::vector<Query>& queries,
                                    const std::vector<GoldAnnotation>& gold,
                                    const std::vector<StrategySpec>& strategies,
                                    EmbeddingProvider& provider, const EvalOptions& options) {
    return collapse_rows(run_cases(corpus, queries, gold, strategies, provider, options), queries);
}

std::vector<SweepAxis> default_sweep_axes() {
    return {
        {"p", {60, 70, 75, 80, 90}},
        {"m", {1, 2, 3, 5, 7}},
        {"lambda", {0.0, 0.1, 0.3, 0.5, 1.0}},
        {"g", {0, 1, 2, 3, 5}},
        {"beta", {0.4, 0.5, 0.6, 0.7, 0.8}},
    };
}

std::vector<SweepRow> sweep_hyperparameters(const std::vector<Document>& corpus,
                                            const std::vector<Query>& queries,
                                            const std::vector<GoldAnnotation>& gold,
                                            const std::vector<SweepAxis>& axes,
                                            EmbeddingProvider& provider,
                                            const EvalOptions& options) {
    std::size_t points = 0;
    for (const auto& axis : axes) points += axis.values.size();
    if (points == 0) throw ValidationError("sweep grid is empty");

    const std::vector<StrategySpec> qasc_only = {StrategySpec::parse("qasc")};
    std::vector<SweepRow> out;

    for (const auto& axis : axes) {
        for (double value : axis.values) {
            EvalOptions point = options;
            if (axis.name == "p") {
                point.qasc.seed_percentile = value;
            } else if (axis.name == "m") {
                point.qasc.window_radius = static_cast<int>(value);
            } else if (axis.name == "lambda") {
                point.qasc.decay = value;
            } else if (axis.name == "g") {
                point.qasc.gap_tolerance = static_cast<int>(value);
            } else if (axis.name == "beta") {
                point.qasc.chunk_threshold_factor = value;
            } else {
                throw ValidationError("unknown sweep axis \"" + axis.name + "\"");
            }

            SweepRow aggregate;
            aggregate.axis = axis.name;
            aggregate.value = value;
            aggregate.aggregate = true;
            aggregate.row.strategy = "qasc";
            aggregate.row.query_id = "ALL";
            aggregate.row.query_type = "all";

            try {
                const std::vector<EvalRow> rows =
                    run_evaluation(corpus, queries, gold, qasc_only, provider, point);
                for (const auto& row : rows) {
                    SweepRow sr;
                    sr.axis = axis.name;
                    sr.value = value;
                    sr.row = row;
                    out.push_back(std::move(sr));

                    aggregate.row.precision += row.precision;
                    aggregate.row.recall += row.recall;
                    aggregate.row.f1 += row.f1;
                    aggregate.row.chunk_count += row.chunk_count;
                    aggregate.row.latency.chunking_ms += row.latency.chunking_ms;
                    aggregate.row.latency.retrieval_ms += row.latency.retrieval_ms;
                }
                if (!rows.empty()) {
                    const auto n = static_cast<double>(rows.size());
                    aggregate.row.precision /= n;
                    aggregate.row.recall /= n;
                    aggregate.row.f1 /= n;
                    aggregate.row.chunk_count /= n;
                    aggregate.row.latency.chunking_ms /= n;
                    aggregate.row.latency.retrieval_ms /= n;
                }
            } catch (const Error& e) {
                aggregate.error = e.what();
            }
            out.push_back(std::move(aggregate));
        }
    }
    return out;
}

std::string report_csv(const std::vector<EvalRow>& rows) {
    std::string out =
        "strategy,query_id,query_type,precision,recall,f1,chunk_count,"
        "latency_chunking_ms,latency_retrieval_ms\n";
    for (const auto& row : rows) {
        out += row.strategy + "," + row.query_id + "," + row.query_type + "," +
               format_double(row.precision) + "," + format_double(row.recall) + "," +
               format_double(row.f1) + "," + format_double(row.chunk_count) + "," +
               format_double(row.latency.chunking_ms) + "," +
               format_double(row.latency.retrieval_ms) + "\n";
    }
    return out;
}

std::string summary_json(const std::vector<EvalRow>& rows) {
    using nlohmann::json;

    struct Accumulator {
        double precision = 0, recall = 0, f1 = 0, chunks = 0, relevant = 0;
        double chunking_ms = 0, retrieval_ms = 0;
        std::size_t count = 0;

        void add(const EvalRow& row) {
            precision += row.precision;
            recall += row.recall;
            f1 += row.f1;
            chunks += row.chunk_count;
            relevant += row.relevant_available;
            chunking_ms += row.latency.chunking_ms;
            retrieval_ms += row.latency.retrieval_ms;
            ++count;
        }
        json to_json() const {
            const double n = count > 0 ? static_cast<double>(count) : 1.0;
            // mean_relevant_available is the recall denominator, averaged:
            // relevant chunks within the strategy's own chunk universe.
            return {{"precision", precision / n},
                    {"recall", recall / n},
                    {"f1", f1 / n},
                    {"mean_chunk_count", chunks / n},
                    {"mean_relevant_available", relevant / n},
                    {"latency_chunking_ms", chunking_ms / n},
                    {"latency_retrieval_ms", retrieval_ms / n},
                    {"query_count", count}};
        }
    };

    std::map<std::string, Accumulator> by_strategy;
    std::map<std::string, std::map<std::string, Accumulator>> by_type;
    for (const auto& row : rows) {
        by_strategy[row.strategy].add(row);
        by_type[row.strategy][row.query_type].add(row);
    }

    json summary;
    summary["strategies"] = json::object();
    for (const auto& [label, acc] : by_strategy) summary["strategies"][label] = acc.to_json();
    summary["query_types"] = json::object();
    for (const auto& [label, types] : by_type) {
        json entry = json::object();
        for (const auto& [type, acc] : types) entry[type] = acc.to_json();
        summary["query_types"][label] = entry;
    }
    return summary.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "axis,value,scope,query_id,query_type,precision,recall,f1,chunk_count,"
        "latency_chunking_ms,latency_retrieval_ms,error\n";
    char value_buf[64];
    for (const auto& row : rows) {
        std::snprintf(value_buf, sizeof(value_buf), "%g", row.value);
        std::string error = row.error;
        std::replace(error.begin(), error.end(), '\n', ' ');
        std::replace(error.begin(), error.end(), ',', ';');
        out += row.axis + "," + value_buf + "," + (row.aggregate ? "aggregate" : "query") + "," +
               row.row.query_id + "," + row.row.query_type + "," + format_double(row.row.precision) +
               "," + format_double(row.row.recall) + "," + format_double(row.row.f1) + "," +
               format_double(row.row.chunk_count) + "," +
               format_double(row.row.latency.chunking_ms) + "," +
               format_double(row.row.latency.retrieval_ms) + "," + error + "\n";
    }
    return out;
}

}  // namespace qasc::eval
