#pragma once

#include <random>
#include <string>
#include <vector>

#include "qasc/chunking.hpp"
#include "qasc/config.hpp"
#include "qasc/embedding.hpp"
#include "qasc/segmenter.hpp"

namespace qasc_tests {

/// Well-formed random document text: capitalized sentences ending in '.',
/// vocabulary free of abbreviations, random paragraph breaks. Segmenting the
/// result yields exactly `sentence_count` sentences.
std::string synthetic_text(int sentence_count, std::mt19937& rng);

qasc::Document synthetic_document(const std::string& id, int sentence_count, std::mt19937& rng);

/// Random query over the same vocabulary as synthetic_text.
std::string synthetic_query(std::mt19937& rng);

/// Profile of random scores in [-1, 1], with occasional exact duplicates.
qasc::SimilarityProfile random_profile(int n, std::mt19937& rng);

/// Config sampled from the standard sweep grids plus both window modes.
qasc::QascConfig random_config(std::mt19937& rng);

/// True when every pair of distinct profile values differs by at least
/// min_gap. Exact ties are fine (identical sentences produce bitwise-equal
/// scores under any input scaling); distinct values inside rounding noise
/// make threshold comparisons ill-posed.
bool profile_well_separated(const qasc::SimilarityProfile& profile, double min_gap);

/// Provider decorator scaling every embedding component by a constant.
class ScaledProvider : public qasc::EmbeddingProvider {
public:
    ScaledProvider(qasc::EmbeddingProvider& inner, double factor)
        : inner_(inner), factor_(factor) {}

    std::string name() const override { return inner_.name(); }
    std::size_t dim() const override { return inner_.dim(); }
    bool deterministic() const override { return inner_.deterministic(); }
    bool concurrent_safe() const override { return inner_.concurrent_safe(); }

    std::vector<qasc::EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override {
        auto out = inner_.embed_batch(texts);
        for (auto& v : out) {
            for (double& x : v) x *= factor_;
        }
        return out;
    }

private:
    qasc::EmbeddingProvider& inner_;
    double factor_;
};

}  // namespace qasc_tests
