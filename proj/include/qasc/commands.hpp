#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qasc/config.hpp"
#include "qasc/embedding.hpp"

namespace qasc::cli {

/// Fully-resolved run configuration. Every tunable is echoed into the output
/// directory as resolved_config.json, defaults included.
struct RunConfig {
    std::string command;  // chunk | eval | sweep | cache-warm

    // Provider selection. Environment variables QASC_PROVIDER_URL and
    // QASC_CACHE_PATH fill provider_url / cache_path when the flags are
    // absent.
    std::string provider = "test";  // test | remote
    std::string provider_url;
    std::string cache_path;
    int test_dim = 384;
    std::uint64_t test_seed = 42;

    // I/O.
    std::string input;   // chunk: corpus .jsonl or plain-text file
    std::string corpus;  // eval/sweep corpus .jsonl
    std::string queries;
    std::string gold;
    std::string output_dir = "out";
    int min_sentences = 0;
    int jobs = 1;
    bool timing = true;

    // chunk command.
    std::string strategy = "qasc";
    QascConfig qasc;
    std::optional<int> fixed_size;
    std::optional<int> recursive_target;
    std::optional<int> recursive_overlap;
    std::optional<double> semantic_percentile;

    // eval / sweep commands.
    std::vector<std::string> strategies = {"qasc"};
    int top_k = 5;
    std::vector<std::string> axes;  // "p" or "p=60,75,90"; empty = full grid
};

/// Applies environment-variable overrides for provider url and cache path.
void apply_env_overrides(RunConfig& config);

std::shared_ptr<EmbeddingProvider> make_provider(const RunConfig& config);

std::string resolved_config_json(const RunConfig& config);

int cmd_chunk(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_cache_warm(const RunConfig& config);

/// Dispatches on config.command and maps errors to exit codes:
/// 0 success, 1 usage/validation, 2 I/O, 3 provider failure.
int run_command(const RunConfig& config);

}  // namespace qasc::cli
