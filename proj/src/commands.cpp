#include "qasc/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "qasc/baselines.hpp"
#include "qasc/cache.hpp"
#include "qasc/chunking.hpp"
#include "qasc/corpus_io.hpp"
#include "qasc/errors.hpp"
#include "qasc/eval.hpp"
#include "qasc/parallel.hpp"
#include "qasc/provider_http.hpp"

namespace qasc::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.output_dir) / name;
}

void write_resolved_config(const RunConfig& config) {
    io::write_file(out_path(config, "resolved_config.json"), resolved_config_json(config));
}

baselines::BaselineConfig effective_baseline(const RunConfig& config,
                                             baselines::BaselineConfig base) {
    if (config.fixed_size) base.fixed_size_tokens = *config.fixed_size;
    if (config.recursive_target) base.recursive_target_tokens = *config.recursive_target;
    if (config.recursive_overlap) base.recursive_overlap_tokens = *config.recursive_overlap;
    if (config.semantic_percentile) base.semantic_boundary_percentile = *config.semantic_percentile;
    return base;
}

// Label naming the baseline and its effective parameters, e.g. "fixed:500".
std::string canonical_label(const baselines::BaselineConfig& config) {
    char buf[64];
    switch (config.strategy) {
        case baselines::Strategy::fixed:
            return "fixed:" + std::to_string(config.fixed_size_tokens);
        case baselines::Strategy::recursive:
            return "recursive:" + std::to_string(config.recursive_target_tokens) + ":" +
                   std::to_string(config.recursive_overlap_tokens);
        case baselines::Strategy::semantic:
            std::snprintf(buf, sizeof(buf), "semantic:%g", config.semantic_boundary_percentile);
            return buf;
    }
    return "unknown";
}

std::vector<eval::SweepAxis> parse_axes(const std::vector<std::string>& specs) {
    if (specs.empty()) return eval::default_sweep_axes();

    const std::vector<eval::SweepAxis> defaults = eval::default_sweep_axes();
    std::vector<eval::SweepAxis> axes;
    for (const std::string& spec : specs) {
        const std::size_t eq = spec.find('=');
        const std::string name = spec.substr(0, eq == std::string::npos ? spec.size() : eq);
        auto it = std::find_if(defaults.begin(), defaults.end(),
                               [&](const auto& a) { return a.name == name; });
        if (it == defaults.end()) {
            throw ValidationError("unknown sweep axis \"" + name +
                                  "\" (expected p, m, lambda, g or beta)");
        }
        eval::SweepAxis axis;
        axis.name = name;
        if (eq == std::string::npos) {
            axis.values = it->values;
        } else {
            std::string rest = spec.substr(eq + 1);
            std::size_t start = 0;
            while (start <= rest.size()) {
                const std::size_t comma = rest.find(',', start);
                const std::string token =
                    rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                if (!token.empty()) {
                    try {
                        axis.values.push_back(std::stod(token));
                    } catch (const std::exception&) {
                        throw ValidationError("sweep axis \"" + spec + "\": invalid value \"" +
                                              token + "\"");
                    }
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        }
        if (axis.values.empty()) {
            throw ValidationError("sweep axis \"" + spec + "\" has no values");
        }
        axes.push_back(std::move(axis));
    }
    return axes;
}

}  // namespace

void apply_env_overrides(RunConfig& config) {
    if (config.provider_url.empty()) {
        if (const char* url = std::getenv("QASC_PROVIDER_URL")) config.provider_url = url;
    }
    if (config.cache_path.empty()) {
        if (const char* path = std::getenv("QASC_CACHE_PATH")) config.cache_path = path;
    }
}

std::shared_ptr<EmbeddingProvider> make_provider(const RunConfig& config) {
    std::shared_ptr<EmbeddingProvider> base;
    if (config.provider == "test") {
        base = std::make_shared<HashingProvider>(static_cast<std::size_t>(config.test_dim),
                                                 config.test_seed);
    } else if (config.provider == "remote") {
        if (config.provider_url.empty()) {
            throw ValidationError(
                "--provider remote requires --provider-url (or QASC_PROVIDER_URL)");
        }
        base = std::make_shared<RemoteProvider>(config.provider_url);
    } else {
        throw ValidationError("unknown provider \"" + config.provider +
                              "\" (expected test or remote)");
    }
    if (!config.cache_path.empty()) {
        base = std::make_shared<CachedProvider>(std::make_shared<EmbeddingCache>(config.cache_path),
                                                base);
    }
    return base;
}

std::string resolved_config_json(const RunConfig& config) {
    ordered_json j;
    j["command"] = config.command;
    j["provider"] = config.provider;
    j["provider_url"] = config.provider_url;
    j["cache_path"] = config.cache_path;
    j["test_dim"] = config.test_dim;
    j["test_seed"] = config.test_seed;
    j["input"] = config.input;
    j["corpus"] = config.corpus;
    j["queries"] = config.queries;
    j["gold"] = config.gold;
    j["output_dir"] = config.output_dir;
    j["min_sentences"] = config.min_sentences;
    j["jobs"] = config.jobs;
    j["timing"] = config.timing;
    j["strategy"] = config.strategy;
    j["strategies"] = config.strategies;
    j["top_k"] = config.top_k;
    j["axes"] = config.axes;

    ordered_json q;
    q["seed_percentile"] = config.qasc.seed_percentile;
    q["window_mode"] = to_string(config.qasc.window_mode);
    q["window_radius"] = config.qasc.window_radius;
    q["boundary_percentile"] = config.qasc.boundary_percentile;
    q["decay"] = config.qasc.decay;
    q["gap_tolerance"] = config.qasc.gap_tolerance;
    q["chunk_threshold_factor"] = config.qasc.chunk_threshold_factor;
    q["output_mode"] = to_string(config.qasc.output_mode);
    q["max_boundary_shift"] = config.qasc.max_boundary_shift;
    j["qasc"] = q;

    const baselines::BaselineConfig base = effective_baseline(config, {});
    ordered_json b;
    b["fixed_size_tokens"] = base.fixed_size_tokens;
    b["recursive_target_tokens"] = base.recursive_target_tokens;
    b["recursive_overlap_tokens"] = base.recursive_overlap_tokens;
    b["semantic_boundary_percentile"] = base.semantic_boundary_percentile;
    j["baselines"] = b;

    return j.dump(2) + "\n";
}

int cmd_chunk(const RunConfig& config) {
    config.qasc.validate();
    if (config.input.empty()) throw ValidationError("--input is required");

    const eval::StrategySpec strategy = eval::StrategySpec::parse(config.strategy);
    if (strategy.is_qasc && config.queries.empty()) {
        throw ValidationError("--queries is required when --strategy qasc (query-time chunking)");
    }

    const std::vector<Document> corpus = io::load_input(config.input, config.min_sentences);
    std::shared_ptr<EmbeddingProvider> provider = make_provider(config);
    if (config.jobs > 1 && !provider->concurrent_safe()) {
        provider = std::make_shared<SerializedProvider>(provider);
    }

    struct Record {
        std::string doc_id;
        std::string query_id;
        std::string jsonl;
    };
    std::vector<Record> records;
    std::mutex records_mutex;

    if (strategy.is_qasc) {
        const std::vector<eval::Query> queries = io::load_queries_jsonl(config.queries);
        std::vector<std::pair<const Document*, const eval::Query*>> pairs;
        for (const auto& doc : corpus) {
            for (const auto& query : queries) pairs.emplace_back(&doc, &query);
        }
        parallel_for(pairs.size(), config.jobs, [&](std::size_t i) {
            const auto& [doc, query] = pairs[i];
            const ChunkSet set = run_qasc(*doc, query->text, *provider, config.qasc, query->id);
            std::string jsonl = io::chunk_records_jsonl(set, *doc, config.qasc.output_mode);
            std::lock_guard<std::mutex> lock(records_mutex);
            records.push_back({doc->id, query->id, std::move(jsonl)});
        });
    } else {
        // Parameters inside the spec ("fixed:300") win over the shared flags.
        const baselines::BaselineConfig base =
            config.strategy.find(':') == std::string::npos
                ? effective_baseline(config, strategy.baseline)
                : strategy.baseline;
        const std::string label = canonical_label(base);
        parallel_for(corpus.size(), config.jobs, [&](std::size_t i) {
            const Document& doc = corpus[i];
            const auto chunks = baselines::chunk_with(doc, base, *provider);
            std::string jsonl = io::chunk_records_jsonl(chunks, doc.id, label);
            std::lock_guard<std::mutex> lock(records_mutex);
            records.push_back({doc.id, "", std::move(jsonl)});
        });
    }

    // Single-writer collection keeps record order deterministic.
    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
        if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
        return a.query_id < b.query_id;
    });
    std::string out;
    for (const auto& r : records) out += r.jsonl;
    io::write_file(out_path(config, "chunks.jsonl"), out);
    write_resolved_config(config);

    std::cout << "wrote " << records.size() << " record group(s) to "
              << out_path(config, "chunks.jsonl").string() << "\n";
    return 0;
}

namespace {

eval::EvalOptions eval_options(const RunConfig& config) {
    eval::EvalOptions options;
    options.retrieval.top_k = config.top_k;
    options.qasc = config.qasc;
    options.timing = config.timing;
    options.jobs = config.jobs;
    return options;
}

struct EvalInputs {
    std::vector<Document> corpus;
    std::vector<eval::Query> queries;
    std::vector<eval::GoldAnnotation> gold;
};

EvalInputs load_eval_inputs(const RunConfig& config) {
    if (config.corpus.empty()) throw ValidationError("--corpus is required");
    if (config.queries.empty()) throw ValidationError("--queries is required");
    if (config.gold.empty()) throw ValidationError("--gold is required");

    EvalInputs inputs;
    inputs.corpus = io::load_corpus_jsonl(config.corpus, 0);
    inputs.queries = io::load_queries_jsonl(config.queries);
    inputs.gold = io::load_gold_jsonl(config.gold);

    // Validate against the full corpus first, then apply the length filter;
    // gold tied to a filtered-out document is excluded, not an error.
    eval::validate_inputs(inputs.corpus, inputs.queries, inputs.gold);
    if (config.min_sentences > 0) {
        std::erase_if(inputs.corpus, [&](const Document& d) {
            return d.sentence_count() < config.min_sentences;
        });
        std::set<std::string> kept;
        for (const auto& d : inputs.corpus) kept.insert(d.id);
        std::erase_if(inputs.gold,
                      [&](const eval::GoldAnnotation& g) { return !kept.count(g.doc_id); });
    }
    return inputs;
}

}  // namespace

int cmd_eval(const RunConfig& config) {
    const EvalInputs inputs = load_eval_inputs(config);

    std::vector<eval::StrategySpec> strategies;
    for (const auto& spec : config.strategies) {
        eval::StrategySpec parsed = eval::StrategySpec::parse(spec);
        // Parameters inside the spec ("fixed:500") win; bare names pick up
        // the shared flags.
        if (spec.find(':') == std::string::npos) {
            parsed.baseline = effective_baseline(config, parsed.baseline);
        }
        strategies.push_back(std::move(parsed));
    }

    std::shared_ptr<EmbeddingProvider> provider = make_provider(config);
    const std::vector<eval::EvalRow> rows = eval::run_evaluation(
        inputs.corpus, inputs.queries, inputs.gold, strategies, *provider, eval_options(config));

    io::write_file(out_path(config, "report.csv"), eval::report_csv(rows));
    io::write_file(out_path(config, "summary.json"), eval::summary_json(rows));
    write_resolved_config(config);

    std::cout << "evaluated " << strategies.size() << " strategy group(s) over " << rows.size()
              << " row(s); reports in " << config.output_dir << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& config) {
    const EvalInputs inputs = load_eval_inputs(config);
    const std::vector<eval::SweepAxis> axes = parse_axes(config.axes);

    std::shared_ptr<EmbeddingProvider> provider = make_provider(config);
    const std::vector<eval::SweepRow> rows = eval::sweep_hyperparameters(
        inputs.corpus, inputs.queries, inputs.gold, axes, *provider, eval_options(config));

    io::write_file(out_path(config, "sweep.csv"), eval::sweep_csv(rows));
    write_resolved_config(config);

    std::size_t points = 0;
    for (const auto& axis : axes) points += axis.values.size();
    std::cout << "swept " << points << " grid point(s); results in "
              << out_path(config, "sweep.csv").string() << "\n";
    return 0;
}

int cmd_cache_warm(const RunConfig& config) {
    if (config.corpus.empty() && config.input.empty()) {
        throw ValidationError("--corpus (or --input) is required");
    }
    if (config.cache_path.empty()) {
        throw ValidationError("cache-warm requires --cache (or QASC_CACHE_PATH)");
    }

    const std::string source = config.corpus.empty() ? config.input : config.corpus;
    const std::vector<Document> corpus = io::load_input(source, config.min_sentences);

    RunConfig inner = config;
    inner.cache_path.clear();
    std::shared_ptr<EmbeddingProvider> provider = make_provider(inner);
    EmbeddingCache cache(config.cache_path);
    const std::size_t before = cache.entry_count();

    std::vector<std::string> texts;
    for (const auto& doc : corpus) {
        for (const auto& s : doc.sentences) texts.push_back(s.text);
    }
    constexpr std::size_t kBatch = 256;
    for (std::size_t i = 0; i < texts.size(); i += kBatch) {
        const std::size_t end = std::min(i + kBatch, texts.size());
        cache.get_or_embed(*provider,
                           std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(i),
                                                    texts.begin() + static_cast<std::ptrdiff_t>(end)));
    }
    write_resolved_config(config);

    std::cout << "warmed " << texts.size() << " sentence(s) across " << corpus.size()
              << " document(s); " << (cache.entry_count() - before) << " new cache entr(ies) in "
              << config.cache_path << "\n";
    return 0;
}

int run_command(const RunConfig& config) {
    try {
        if (config.command == "chunk") return cmd_chunk(config);
        if (config.command == "eval") return cmd_eval(config);
        if (config.command == "sweep") return cmd_sweep(config);
        if (config.command == "cache-warm") return cmd_cache_warm(config);
        throw ValidationError("unknown command \"" + config.command + "\"");
    } catch (const ProviderError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qasc::cli
