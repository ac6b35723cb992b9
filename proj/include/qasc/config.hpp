#pragma once

#include <string>

namespace qasc {

enum class WindowMode { fixed, adaptive };
enum class OutputMode { chunk_set, composed_summary };

std::string to_string(WindowMode mode);
std::string to_string(OutputMode mode);
WindowMode window_mode_from_string(const std::string& s);
OutputMode output_mode_from_string(const std::string& s);

/// Tunables of the query-adaptive chunking pipeline.
struct QascConfig {
    double seed_percentile = 75.0;        // percentile of the profile defining the seed threshold
    WindowMode window_mode = WindowMode::fixed;
    int window_radius = 3;                // fixed-mode context sentences on each side of a seed
    double boundary_percentile = 40.0;    // adaptive-mode expansion stop threshold percentile
    double decay = 0.3;                   // positional weight decay rate
    int gap_tolerance = 2;                // max sentence gap merged between adjacent chunks
    double chunk_threshold_factor = 0.6;  // min aggregate score as a fraction of the seed threshold
    OutputMode output_mode = OutputMode::chunk_set;
    int max_boundary_shift = 2;           // max sentences a boundary may move toward a paragraph break

    /// Throws ValidationError on any out-of-range value.
    void validate() const;
};

}  // namespace qasc
