#include "qasc/config.hpp"

#include "qasc/errors.hpp"

namespace qasc {

std::string to_string(WindowMode mode) {
    return mode == WindowMode::fixed ? "fixed" : "adaptive";
}

std::string to_string(OutputMode mode) {
    return mode == OutputMode::chunk_set ? "chunk_set" : "composed_summary";
}

WindowMode window_mode_from_string(const std::string& s) {
    if (s == "fixed") return WindowMode::fixed;
    if (s == "adaptive") return WindowMode::adaptive;
    throw ValidationError("unknown window mode: " + s);
}

OutputMode output_mode_from_string(const std::string& s) {
    if (s == "chunk_set") return OutputMode::chunk_set;
    if (s == "composed_summary") return OutputMode::composed_summary;
    throw ValidationError("unknown output mode: " + s);
}

void QascConfig::validate() const {
    if (!(seed_percentile >= 0.0 && seed_percentile <= 100.0)) {
        throw ValidationError("seed_percentile must lie in [0, 100]");
    }
    if (!(boundary_percentile >= 0.0 && boundary_percentile <= 100.0)) {
        throw ValidationError("boundary_percentile must lie in [0, 100]");
    }
    if (window_radius < 0) throw ValidationError("window_radius must be non-negative");
    if (!(decay >= 0.0)) throw ValidationError("decay must be non-negative");
    if (gap_tolerance < 0) throw ValidationError("gap_tolerance must be non-negative");
    if (!(chunk_threshold_factor > 0.0)) {
        throw ValidationError("chunk_threshold_factor must be positive");
    }
    if (max_boundary_shift < 0) throw ValidationError("max_boundary_shift must be non-negative");
}

}  // namespace qasc
