#include <doctest.h>

#include <algorithm>
#include <random>

#include "qasc/errors.hpp"
#include "qasc/eval.hpp"
#include "support/fixtures.hpp"

using namespace qasc;
using namespace qasc::eval;

namespace {

RetrievalChunk chunk(int first, int last, std::string text) {
    return {first, last, std::move(text), 0.0};
}

GoldAnnotation gold_for(std::string query_id, std::string doc_id, std::set<int> sentences) {
    return {std::move(query_id), std::move(doc_id), std::move(sentences)};
}

}  // namespace

TEST_CASE("index_and_retrieve returns everything when fewer than k chunks exist") {
    HashingProvider provider(64, 5);
    const std::vector<RetrievalChunk> chunks = {chunk(1, 2, "copper turbine"),
                                                chunk(3, 4, "violet meadow"),
                                                chunk(5, 6, "glacier summit")};
    const auto ranked = index_and_retrieve(chunks, provider.embed("copper turbine"), provider, 5);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].chunk_index == 0);
    CHECK(ranked[0].similarity >= ranked[1].similarity);
    CHECK(ranked[1].similarity >= ranked[2].similarity);
}

TEST_CASE("index_and_retrieve: chunk embedding equal to the query ranks first at 1.0") {
    HashingProvider provider(64, 5);
    const std::vector<RetrievalChunk> chunks = {chunk(4, 5, "unrelated filler words"),
                                                chunk(1, 2, "exact match text")};
    const auto ranked = index_and_retrieve(chunks, provider.embed("exact match text"), provider, 1);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].chunk_index == 1);
    CHECK(ranked[0].similarity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("index_and_retrieve matches a full-sort oracle, ties included") {
    std::mt19937 rng(321);
    HashingProvider provider(32, 8);
    for (int trial = 0; trial < 100; ++trial) {
        const int count = std::uniform_int_distribution<int>(1, 20)(rng);
        std::vector<RetrievalChunk> chunks;
        for (int i = 0; i < count; ++i) {
            // Duplicated texts produce exact score ties.
            const std::string text = "chunk text " + std::to_string(
                std::uniform_int_distribution<int>(0, count / 2 + 1)(rng));
            const int start = std::uniform_int_distribution<int>(1, 50)(rng);
            chunks.push_back(chunk(start, start + 1, text));
        }
        const EmbeddingVector query = provider.embed(qasc_tests::synthetic_query(rng));
        const int k = std::uniform_int_distribution<int>(1, 8)(rng);

        const auto ranked = index_and_retrieve(chunks, query, provider, k);

        // Oracle: normalize, inner product, stable full sort.
        EmbeddingVector q = query;
        double qn = l2_norm(q);
        for (double& x : q) x /= qn;
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            EmbeddingVector v = provider.embed(chunks[i].text);
            const double n = l2_norm(v);
            for (double& x : v) x /= n;
            scored.emplace_back(dot(v, q), i);
        }
        std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            if (chunks[a.second].start_sentence != chunks[b.second].start_sentence) {
                return chunks[a.second].start_sentence < chunks[b.second].start_sentence;
            }
            if (chunks[a.second].end_sentence != chunks[b.second].end_sentence) {
                return chunks[a.second].end_sentence < chunks[b.second].end_sentence;
            }
            return a.second < b.second;
        });

        REQUIRE(ranked.size() == std::min<std::size_t>(chunks.size(), static_cast<std::size_t>(k)));
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            CHECK(ranked[i].chunk_index == scored[i].second);
            CHECK(ranked[i].similarity == doctest::Approx(scored[i].first).epsilon(1e-12));
        }
    }
}

TEST_CASE("judge_relevance intersects the chunk range with gold sentences") {
    const GoldAnnotation gold = gold_for("q", "d", {5});
    CHECK(judge_relevance(chunk(3, 7, ""), gold));
    CHECK_FALSE(judge_relevance(chunk(3, 7, ""), gold_for("q", "d", {9})));
    CHECK(judge_relevance(chunk(5, 5, ""), gold));
    CHECK(judge_relevance(chunk(1, 5, ""), gold));
    CHECK_FALSE(judge_relevance(chunk(6, 9, ""), gold));

    // A token-split chunk that only grazes sentence 5 still counts.
    CHECK(judge_relevance(chunk(5, 6, "partial sentence five"), gold));
}

TEST_CASE("compute_metrics formulas and degenerate cases") {
    std::vector<RetrievalChunk> all;
    for (int i = 0; i < 10; ++i) all.push_back(chunk(i * 10 + 1, i * 10 + 2, ""));
    // Chunks 0..7 relevant (gold hits their spans), 8..9 not.
    std::set<int> gold_sentences;
    for (int i = 0; i < 8; ++i) gold_sentences.insert(i * 10 + 1);
    const GoldAnnotation gold = gold_for("q", "d", gold_sentences);

    SUBCASE("precision counts relevant retrieved over retrieved") {
        // Retrieve chunks 0..3 (relevant) and 8 (not): precision 0.8.
        std::vector<RankedChunk> retrieved = {{0, .9}, {1, .8}, {2, .7}, {3, .6}, {8, .5}};
        const Metrics m = compute_metrics(retrieved, all, gold);
        CHECK(m.precision == doctest::Approx(0.8));
        CHECK(m.recall == doctest::Approx(0.5));  // 4 of 8 available
        CHECK(m.f1 == doctest::Approx(0.61538).epsilon(1e-5));
        CHECK(m.f1 >= std::min(m.precision, m.recall));
        CHECK(m.f1 <= std::max(m.precision, m.recall));
    }

    SUBCASE("empty retrieval yields zero precision and f1") {
        const Metrics m = compute_metrics({}, all, gold);
        CHECK(m.precision == 0.0);
        CHECK(m.f1 == 0.0);
    }

    SUBCASE("no relevant chunk available yields zero recall") {
        const GoldAnnotation unreachable = gold_for("q", "d", {999});
        const Metrics m = compute_metrics({{0, .9}}, all, unreachable);
        CHECK(m.recall == 0.0);
        CHECK(m.precision == 0.0);
        CHECK(m.f1 == 0.0);
    }

    SUBCASE("perfect retrieval is exactly 1.0 across the board") {
        std::vector<RetrievalChunk> tiny = {chunk(1, 2, ""), chunk(5, 6, "")};
        const GoldAnnotation g = gold_for("q", "d", {1, 5});
        const Metrics m = compute_metrics({{0, .9}, {1, .8}}, tiny, g);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
    }
}

TEST_CASE("metric bounds hold on random instances") {
    std::mt19937 rng(654);
    for (int trial = 0; trial < 200; ++trial) {
        const int count = std::uniform_int_distribution<int>(1, 12)(rng);
        std::vector<RetrievalChunk> all;
        for (int i = 0; i < count; ++i) {
            const int start = std::uniform_int_distribution<int>(1, 30)(rng);
            all.push_back(chunk(start, start + std::uniform_int_distribution<int>(0, 4)(rng), ""));
        }
        std::set<int> sentences;
        const int gold_count = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int i = 0; i < gold_count; ++i) {
            sentences.insert(std::uniform_int_distribution<int>(1, 34)(rng));
        }
        const GoldAnnotation gold = gold_for("q", "d", sentences);

        std::vector<RankedChunk> retrieved;
        const int k = std::uniform_int_distribution<int>(0, count)(rng);
        for (int i = 0; i < k; ++i) retrieved.push_back({static_cast<std::size_t>(i), 0.5});

        const Metrics m = compute_metrics(retrieved, all, gold);
        CHECK(m.precision >= 0.0);
        CHECK(m.precision <= 1.0);
        CHECK(m.recall >= 0.0);
        CHECK(m.recall <= 1.0);
        CHECK(m.f1 >= 0.0);
        CHECK(m.f1 <= 1.0);
        if (m.precision > 0.0 && m.recall > 0.0) {
            CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
            CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
        }
    }
}

TEST_CASE("measure_latency sums stages and handles empty runs") {
    const LatencyReport report = measure_latency({{300.0, 80.0}, {100.0, 20.0}});
    CHECK(report.query_count == 2);
    CHECK(report.total.chunking_ms == doctest::Approx(400.0));
    CHECK(report.total.retrieval_ms == doctest::Approx(100.0));
    CHECK(report.mean.chunking_ms == doctest::Approx(200.0));
    CHECK(StageTimings{300.0, 80.0}.total_ms() == doctest::Approx(380.0));

    const LatencyReport empty = measure_latency({});
    CHECK(empty.query_count == 0);
    CHECK(empty.total.total_ms() == 0.0);
    CHECK(empty.mean.total_ms() == 0.0);
}

TEST_CASE("StrategySpec parses compact specs") {
    CHECK(StrategySpec::parse("qasc").is_qasc);
    const StrategySpec fixed = StrategySpec::parse("fixed:150");
    CHECK(fixed.baseline.strategy == baselines::Strategy::fixed);
    CHECK(fixed.baseline.fixed_size_tokens == 150);
    const StrategySpec recursive = StrategySpec::parse("recursive:400:40");
    CHECK(recursive.baseline.recursive_target_tokens == 400);
    CHECK(recursive.baseline.recursive_overlap_tokens == 40);
    const StrategySpec semantic = StrategySpec::parse("semantic:30");
    CHECK(semantic.baseline.semantic_boundary_percentile == 30.0);

    CHECK_THROWS_AS(StrategySpec::parse("unknown"), ValidationError);
    CHECK_THROWS_AS(StrategySpec::parse("fixed:abc"), ValidationError);
    CHECK_THROWS_AS(StrategySpec::parse("qasc:5"), ValidationError);
    CHECK_THROWS_AS(StrategySpec::parse("fixed:0"), ValidationError);
}

namespace {

struct Fixture {
    std::vector<Document> corpus;
    std::vector<Query> queries;
    std::vector<GoldAnnotation> gold;
};

// One document whose sentences 3..4 answer the single query; everything else
// is unrelated filler.
Fixture perfect_fixture() {
    Fixture f;
    f.corpus.push_back(segment_document(
        "doc1",
        "Bricks and mortar hold the wall. Cooking pasta requires salted water. "
        "Quantum flux capacitors regulate temporal drift. "
        "Quantum drift compensation needs flux tuning. "
        "Jazz musicians improvise over chord changes. "
        "Gardens need regular watering in summer."));
    f.queries.push_back({"q1", "quantum flux capacitor temporal drift", "factoid"});
    f.gold.push_back(gold_for("q1", "doc1", {3, 4}));
    return f;
}

}  // namespace

TEST_CASE("validate_inputs lists all offenders before any work") {
    Fixture f = perfect_fixture();
    f.gold.push_back(gold_for("missing_query", "doc1", {1}));
    f.gold.push_back(gold_for("q1", "missing_doc", {1}));
    f.gold.push_back(gold_for("q1", "doc1", {99}));

    try {
        validate_inputs(f.corpus, f.queries, f.gold);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("missing_query") != std::string::npos);
        CHECK(what.find("missing_doc") != std::string::npos);
        CHECK(what.find("sentence 99") != std::string::npos);
    }
}

TEST_CASE("run_evaluation: qasc on the perfect fixture scores f1 = 1.0") {
    const Fixture f = perfect_fixture();
    HashingProvider provider(384, 42);
    EvalOptions options;
    options.timing = false;

    const auto rows = run_evaluation(f.corpus, f.queries, f.gold,
                                     {StrategySpec::parse("qasc")}, provider, options);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].strategy == "qasc");
    CHECK(rows[0].query_id == "q1");
    CHECK(rows[0].query_type == "factoid");
    CHECK(rows[0].f1 == doctest::Approx(1.0));
    CHECK(rows[0].latency.chunking_ms == 0.0);  // timing disabled
}

TEST_CASE("run_evaluation: selected strategies each produce a row group") {
    const Fixture f = perfect_fixture();
    HashingProvider provider(128, 42);
    EvalOptions options;
    options.timing = false;

    const auto rows =
        run_evaluation(f.corpus, f.queries, f.gold,
                       {StrategySpec::parse("qasc"), StrategySpec::parse("fixed:500"),
                        StrategySpec::parse("semantic")},
                       provider, options);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].strategy == "qasc");
    CHECK(rows[1].strategy == "fixed:500");
    CHECK(rows[2].strategy == "semantic");
}

TEST_CASE("run_evaluation is identical with and without a worker pool") {
    std::mt19937 rng(1999);
    Fixture f;
    for (int d = 0; d < 4; ++d) {
        f.corpus.push_back(qasc_tests::synthetic_document("doc" + std::to_string(d), 20, rng));
    }
    const std::vector<std::string> types = {"factoid", "topical", "comparative", "multi_hop"};
    for (int q = 0; q < 6; ++q) {
        f.queries.push_back({"q" + std::to_string(q), qasc_tests::synthetic_query(rng),
                             types[static_cast<std::size_t>(q) % 4]});
        f.gold.push_back(gold_for("q" + std::to_string(q), "doc" + std::to_string(q % 4),
                                  {1 + q, 2 + q}));
    }

    HashingProvider provider(64, 23);
    EvalOptions serial;
    serial.timing = false;
    EvalOptions parallel = serial;
    parallel.jobs = 4;

    const auto a = run_evaluation(f.corpus, f.queries, f.gold,
                                  {StrategySpec::parse("qasc"), StrategySpec::parse("fixed:30")},
                                  provider, serial);
    const auto b = run_evaluation(f.corpus, f.queries, f.gold,
                                  {StrategySpec::parse("qasc"), StrategySpec::parse("fixed:30")},
                                  provider, parallel);
    CHECK(report_csv(a) == report_csv(b));
}

TEST_CASE("sweep_hyperparameters: grid cardinality and lambda=0 property") {
    std::mt19937 rng(2001);
    Fixture f;
    f.corpus.push_back(qasc_tests::synthetic_document("doc0", 15, rng));
    f.corpus.push_back(qasc_tests::synthetic_document("doc1", 15, rng));
    f.queries.push_back({"q0", qasc_tests::synthetic_query(rng), "topical"});
    f.queries.push_back({"q1", qasc_tests::synthetic_query(rng), "factoid"});
    f.gold.push_back(gold_for("q0", "doc0", {2, 3}));
    f.gold.push_back(gold_for("q1", "doc1", {5}));

    HashingProvider provider(64, 31);
    EvalOptions options;
    options.timing = false;

    SUBCASE("single axis with three points yields three aggregates") {
        const auto rows = sweep_hyperparameters(f.corpus, f.queries, f.gold,
                                                {{"p", {60, 75, 90}}}, provider, options);
        std::size_t aggregates = 0;
        for (const auto& r : rows) {
            if (r.aggregate) {
                ++aggregates;
                CHECK(r.axis == "p");
                CHECK(r.error.empty());
            }
        }
        CHECK(aggregates == 3);
    }

    SUBCASE("full default grid has 25 aggregate rows") {
        const auto rows = sweep_hyperparameters(f.corpus, f.queries, f.gold,
                                                default_sweep_axes(), provider, options);
        std::size_t aggregates = 0;
        for (const auto& r : rows) aggregates += r.aggregate ? 1 : 0;
        CHECK(aggregates == 25);
    }

    SUBCASE("empty grid is rejected") {
        CHECK_THROWS_AS(
            sweep_hyperparameters(f.corpus, f.queries, f.gold, {}, provider, options),
            ValidationError);
    }
}

namespace {

/// Deterministic provider that fails exactly one embed_batch call by
/// sequence number, for exercising per-point sweep error handling.
class FailingOnceProvider : public EmbeddingProvider {
public:
    FailingOnceProvider(std::size_t failing_call) : failing_call_(failing_call) {}

    std::string name() const override { return "failing-once"; }
    std::size_t dim() const override { return inner_.dim(); }
    bool deterministic() const override { return true; }

    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        if (++calls_ == failing_call_) {
            throw ProviderError("injected failure", /*retriable=*/true, texts.size());
        }
        return inner_.embed_batch(texts);
    }

private:
    HashingProvider inner_{64, 31};
    std::size_t failing_call_;
    std::size_t calls_ = 0;
};

}  // namespace

TEST_CASE("sweep records a failing grid point and keeps going") {
    const Fixture f = perfect_fixture();
    EvalOptions options;
    options.timing = false;

    // Each healthy grid point makes exactly 4 provider calls on this fixture
    // (sentence batch, query, query again for retrieval, chunk batch), so
    // failing call 5 kills only the second point.
    FailingOnceProvider provider(5);
    const auto rows = sweep_hyperparameters(f.corpus, f.queries, f.gold, {{"p", {60, 75, 90}}},
                                            provider, options);

    std::vector<SweepRow> aggregates;
    for (const auto& r : rows) {
        if (r.aggregate) aggregates.push_back(r);
    }
    REQUIRE(aggregates.size() == 3);
    CHECK(aggregates[0].error.empty());
    CHECK(aggregates[1].error.find("injected failure") != std::string::npos);
    CHECK(aggregates[2].error.empty());

    // The points after the failure still ran: their per-query rows exist.
    std::size_t point3_rows = 0;
    for (const auto& r : rows) {
        if (!r.aggregate && r.value == 90.0) ++point3_rows;
    }
    CHECK(point3_rows == 1);

    const std::string csv = sweep_csv(rows);
    CHECK(csv.find("injected failure") != std::string::npos);
}

TEST_CASE("report_csv and summary_json are stable and well-formed") {
    EvalRow row;
    row.strategy = "qasc";
    row.query_id = "q1";
    row.query_type = "factoid";
    row.precision = 1.0;
    row.recall = 0.5;
    row.f1 = 2.0 / 3.0;
    row.chunk_count = 3;
    row.latency = {12.5, 2.25};

    const std::string csv = report_csv({row});
    CHECK(csv ==
          "strategy,query_id,query_type,precision,recall,f1,chunk_count,"
          "latency_chunking_ms,latency_retrieval_ms\n"
          "qasc,q1,factoid,1.000000,0.500000,0.666667,3.000000,12.500000,2.250000\n");

    const std::string json_text = summary_json({row});
    CHECK(json_text.find("\"strategies\"") != std::string::npos);
    CHECK(json_text.find("\"qasc\"") != std::string::npos);
    CHECK(json_text.find("\"factoid\"") != std::string::npos);
    // The strategy-relative recall denominator is logged for auditing.
    CHECK(json_text.find("\"mean_relevant_available\"") != std::string::npos);
}
