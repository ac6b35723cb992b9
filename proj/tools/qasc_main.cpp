#include <CLI11.hpp>

#include "qasc/commands.hpp"
#include "qasc/config.hpp"

namespace {

void add_provider_flags(CLI::App* cmd, qasc::cli::RunConfig& config) {
    cmd->add_option("--provider", config.provider, "Embedding provider: test | remote")
        ->check(CLI::IsMember({"test", "remote"}))
        ->capture_default_str();
    cmd->add_option("--provider-url", config.provider_url,
                    "Remote provider base URL (env: QASC_PROVIDER_URL)");
    cmd->add_option("--cache", config.cache_path,
                    "Embedding cache file; wraps the provider (env: QASC_CACHE_PATH)");
    cmd->add_option("--test-dim", config.test_dim, "Test provider dimensionality")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--test-seed", config.test_seed, "Test provider hash seed")
        ->capture_default_str();
}

void add_common_flags(CLI::App* cmd, qasc::cli::RunConfig& config) {
    cmd->add_option("--output", config.output_dir, "Output directory")->capture_default_str();
    cmd->add_option("--jobs", config.jobs, "Worker threads over (document, query) pairs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--timing,!--no-timing", config.timing,
                  "Measure stage latencies (--no-timing writes zeros for reproducible reports)");
    cmd->add_option("--min-sentences", config.min_sentences,
                    "Drop documents with fewer sentences")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_qasc_flags(CLI::App* cmd, qasc::cli::RunConfig& config, std::string& window_mode,
                    std::string& output_mode) {
    cmd->add_option("--seed-percentile", config.qasc.seed_percentile,
                    "Profile percentile defining the seed threshold")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--window-mode", window_mode, "Window expansion: fixed | adaptive")
        ->check(CLI::IsMember({"fixed", "adaptive"}))
        ->capture_default_str();
    cmd->add_option("--window-radius", config.qasc.window_radius,
                    "Fixed-mode context sentences on each side of a seed")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--boundary-percentile", config.qasc.boundary_percentile,
                    "Adaptive-mode expansion stop percentile")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--decay", config.qasc.decay, "Positional weight decay rate")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--gap-tolerance", config.qasc.gap_tolerance,
                    "Max sentence gap merged between adjacent chunks")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--chunk-threshold-factor", config.qasc.chunk_threshold_factor,
                    "Min aggregate score as a fraction of the seed threshold")
        ->capture_default_str();
    cmd->add_option("--mode", output_mode, "Output mode: chunk_set | composed_summary")
        ->check(CLI::IsMember({"chunk_set", "composed_summary"}))
        ->capture_default_str();
    cmd->add_option("--max-boundary-shift", config.qasc.max_boundary_shift,
                    "Max sentences a chunk boundary may move toward a paragraph break")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_baseline_flags(CLI::App* cmd, qasc::cli::RunConfig& config) {
    cmd->add_option("--fixed-size", config.fixed_size,
                    "Fixed chunk size in whitespace tokens (default 500)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--recursive-target", config.recursive_target,
                    "Recursive splitter target tokens (default 500)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--recursive-overlap", config.recursive_overlap,
                    "Recursive splitter overlap tokens (default 50)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--semantic-percentile", config.semantic_percentile,
                    "Semantic baseline boundary percentile (default 25)")
        ->check(CLI::Range(0.0, 100.0));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Query-adaptive semantic chunking, baselines and retrieval evaluation"};
    app.require_subcommand(1);

    qasc::cli::RunConfig config;
    std::string window_mode = "fixed";
    std::string output_mode = "chunk_set";

    CLI::App* chunk = app.add_subcommand("chunk", "Chunk documents and emit JSONL records");
    chunk->add_option("--input", config.input, "Corpus .jsonl or a plain-text file")->required();
    chunk->add_option("--strategy", config.strategy,
                      "Chunking strategy: qasc | fixed | recursive | semantic")
        ->capture_default_str();
    chunk->add_option("--queries", config.queries,
                      "Queries .jsonl (required for --strategy qasc)");
    add_qasc_flags(chunk, config, window_mode, output_mode);
    add_baseline_flags(chunk, config);
    add_provider_flags(chunk, config);
    add_common_flags(chunk, config);

    CLI::App* eval = app.add_subcommand("eval", "Chunk, retrieve top-k and score against gold");
    eval->add_option("--corpus", config.corpus, "Corpus .jsonl")->required();
    eval->add_option("--queries", config.queries, "Queries .jsonl")->required();
    eval->add_option("--gold", config.gold, "Gold annotations .jsonl")->required();
    eval->add_option("--strategies", config.strategies,
                     "Comma-separated strategy specs, e.g. qasc,fixed:500,semantic")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--top-k", config.top_k, "Chunks retrieved per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_qasc_flags(eval, config, window_mode, output_mode);
    add_baseline_flags(eval, config);
    add_provider_flags(eval, config);
    add_common_flags(eval, config);

    CLI::App* sweep = app.add_subcommand("sweep", "One-at-a-time hyperparameter sweep");
    sweep->add_option("--corpus", config.corpus, "Corpus .jsonl")->required();
    sweep->add_option("--queries", config.queries, "Queries .jsonl")->required();
    sweep->add_option("--gold", config.gold, "Gold annotations .jsonl")->required();
    sweep->add_option("--axis", config.axes,
                      "Axis to sweep: p | m | lambda | g | beta, optionally with values "
                      "(\"p=60,75,90\"); repeatable; default sweeps all five");
    sweep->add_option("--top-k", config.top_k, "Chunks retrieved per query")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_qasc_flags(sweep, config, window_mode, output_mode);
    add_provider_flags(sweep, config);
    add_common_flags(sweep, config);

    CLI::App* warm = app.add_subcommand("cache-warm", "Pre-embed all corpus sentences into a cache");
    warm->add_option("--corpus", config.corpus, "Corpus .jsonl");
    warm->add_option("--input", config.input, "Alias for --corpus; also accepts a text file");
    add_provider_flags(warm, config);
    add_common_flags(warm, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors map to exit code 1
    }

    config.qasc.window_mode = qasc::window_mode_from_string(window_mode);
    config.qasc.output_mode = qasc::output_mode_from_string(output_mode);
    if (chunk->parsed()) config.command = "chunk";
    if (eval->parsed()) config.command = "eval";
    if (sweep->parsed()) config.command = "sweep";
    if (warm->parsed()) config.command = "cache-warm";

    qasc::cli::apply_env_overrides(config);
    return qasc::cli::run_command(config);
}
