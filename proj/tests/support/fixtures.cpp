#include "support/fixtures.hpp"

#include <algorithm>
#include <cctype>

namespace qasc_tests {
namespace {

const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> kWords = {
        "signal", "lattice", "monsoon", "quartz",  "ember",   "harbor", "violet", "cascade",
        "thermal", "gradient", "copper", "meadow", "turbine", "basalt", "orbit",  "cedar",
        "plasma", "rivet",    "summit", "dune",    "glacier", "prism",  "raven",  "tundra",
    };
    return kWords;
}

}  // namespace

std::string synthetic_text(int sentence_count, std::mt19937& rng) {
    const auto& words = vocabulary();
    std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
    std::uniform_int_distribution<int> word_count(3, 9);
    std::uniform_int_distribution<int> para_break(0, 4);

    std::string text;
    for (int s = 0; s < sentence_count; ++s) {
        std::string sentence;
        const int w = word_count(rng);
        for (int i = 0; i < w; ++i) {
            if (i > 0) sentence += " ";
            sentence += words[word_pick(rng)];
        }
        sentence[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence[0])));
        sentence += ".";
        text += sentence;
        if (s + 1 < sentence_count) text += para_break(rng) == 0 ? "\n\n" : " ";
    }
    return text;
}

qasc::Document synthetic_document(const std::string& id, int sentence_count, std::mt19937& rng) {
    return qasc::segment_document(id, synthetic_text(sentence_count, rng));
}

std::string synthetic_query(std::mt19937& rng) {
    const auto& words = vocabulary();
    std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
    std::uniform_int_distribution<int> word_count(2, 5);
    std::string query;
    const int w = word_count(rng);
    for (int i = 0; i < w; ++i) {
        if (i > 0) query += " ";
        query += words[word_pick(rng)];
    }
    return query;
}

qasc::SimilarityProfile random_profile(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> score(-1.0, 1.0);
    std::uniform_int_distribution<int> dup(0, 4);

    qasc::SimilarityProfile profile;
    profile.doc_id = "synthetic";
    profile.query_id = "q";
    profile.scores.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i > 0 && dup(rng) == 0) {
            // Exact duplicate of an earlier score: exercises threshold ties.
            std::uniform_int_distribution<int> pick(0, i - 1);
            profile.scores.push_back(profile.scores[static_cast<std::size_t>(pick(rng))]);
        } else {
            profile.scores.push_back(score(rng));
        }
    }
    return profile;
}

bool profile_well_separated(const qasc::SimilarityProfile& profile, double min_gap) {
    std::vector<double> sorted = profile.scores;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const double gap = sorted[i + 1] - sorted[i];
        if (gap != 0.0 && gap < min_gap) return false;
    }
    return true;
}

qasc::QascConfig random_config(std::mt19937& rng) {
    auto pick = [&rng](const std::vector<double>& values) {
        std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
        return values[d(rng)];
    };

    qasc::QascConfig config;
    config.seed_percentile = pick({60, 70, 75, 80, 90});
    config.window_radius = static_cast<int>(pick({1, 2, 3, 5, 7}));
    config.decay = pick({0.0, 0.1, 0.3, 0.5, 1.0});
    config.gap_tolerance = static_cast<int>(pick({0, 1, 2, 3, 5}));
    config.chunk_threshold_factor = pick({0.4, 0.5, 0.6, 0.7, 0.8});
    config.window_mode =
        std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? qasc::WindowMode::fixed
                                                           : qasc::WindowMode::adaptive;
    config.boundary_percentile = pick({25, 40, 55});
    config.max_boundary_shift = static_cast<int>(pick({0, 1, 2, 3}));
    return config;
}

}  // namespace qasc_tests
