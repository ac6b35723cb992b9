#include "support/reference_pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace qasc_tests {
namespace {

// Naive linear-interpolation percentile, written from the definition. The
// interpolation expression matches the documented contract literally so that
// a threshold landing on tied values is exact.
double ref_percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double rank = (p / 100.0) * static_cast<double>(n - 1);
    std::size_t lo = 0;
    while (static_cast<double>(lo + 1) <= rank) ++lo;
    if (lo + 1 >= n) return values[n - 1];
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double ref_score(const std::vector<double>& profile, int first, int last,
                 const std::vector<int>& seeds, double decay) {
    double num = 0.0;
    double den = 0.0;
    for (int i = first; i <= last; ++i) {
        double w = 0.0;
        for (int r : seeds) {
            const double cand = std::exp(-decay * std::abs(i - r));
            if (cand > w) w = cand;
        }
        num += w * profile[static_cast<std::size_t>(i - 1)];
        den += w;
    }
    return num / den;
}

bool ref_is_para_start(const qasc::Document& doc, int index) {
    return doc.paragraph_starts.count(index) > 0;
}

}  // namespace

std::vector<ReferenceChunk> reference_pipeline(const qasc::Document& doc,
                                               const std::vector<double>& profile,
                                               const qasc::QascConfig& config) {
    const int n = static_cast<int>(profile.size());

    // Thresholds.
    const double tau = ref_percentile(profile, config.seed_percentile);
    const double tau_boundary = ref_percentile(profile, config.boundary_percentile);

    // Seeds.
    std::vector<int> seeds;
    for (int i = 1; i <= n; ++i) {
        if (profile[static_cast<std::size_t>(i - 1)] >= tau) seeds.push_back(i);
    }

    // Windows.
    std::vector<ReferenceChunk> candidates;
    for (int r : seeds) {
        ReferenceChunk c;
        c.seeds = {r};
        if (config.window_mode == qasc::WindowMode::fixed) {
            c.first = r - config.window_radius;
            if (c.first < 1) c.first = 1;
            c.last = r + config.window_radius;
            if (c.last > n) c.last = n;
        } else {
            c.first = r;
            while (c.first > 1 && profile[static_cast<std::size_t>(c.first - 2)] >= tau_boundary) {
                --c.first;
            }
            c.last = r;
            while (c.last < n && profile[static_cast<std::size_t>(c.last)] >= tau_boundary) {
                ++c.last;
            }
        }
        candidates.push_back(c);
    }

    // Deduplicate identical spans, unioning seeds.
    std::vector<ReferenceChunk> unique;
    for (const auto& c : candidates) {
        bool found = false;
        for (auto& u : unique) {
            if (u.first == c.first && u.last == c.last) {
                for (int r : c.seeds) {
                    if (std::find(u.seeds.begin(), u.seeds.end(), r) == u.seeds.end()) {
                        u.seeds.push_back(r);
                    }
                }
                found = true;
                break;
            }
        }
        if (!found) unique.push_back(c);
    }
    for (auto& u : unique) {
        std::sort(u.seeds.begin(), u.seeds.end());
        u.score = ref_score(profile, u.first, u.last, u.seeds, config.decay);
    }

    // Filter.
    std::vector<ReferenceChunk> kept;
    for (const auto& u : unique) {
        if (u.score >= config.chunk_threshold_factor * tau) kept.push_back(u);
    }

    // Merge to fixpoint.
    std::sort(kept.begin(), kept.end(), [](const ReferenceChunk& a, const ReferenceChunk& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.last < b.last;
    });
    bool merged_any = true;
    while (merged_any) {
        merged_any = false;
        for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
            if (kept[i + 1].first - kept[i].last <= config.gap_tolerance) {
                ReferenceChunk merged;
                merged.first = std::min(kept[i].first, kept[i + 1].first);
                merged.last = std::max(kept[i].last, kept[i + 1].last);
                merged.seeds = kept[i].seeds;
                for (int r : kept[i + 1].seeds) {
                    if (std::find(merged.seeds.begin(), merged.seeds.end(), r) ==
                        merged.seeds.end()) {
                        merged.seeds.push_back(r);
                    }
                }
                std::sort(merged.seeds.begin(), merged.seeds.end());
                merged.score = ref_score(profile, merged.first, merged.last, merged.seeds,
                                         config.decay);
                kept[i] = merged;
                kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                merged_any = true;
                break;
            }
        }
    }

    // Boundary adjustment, left to right. A start is aligned on a paragraph
    // start; an end is aligned when the next sentence starts a paragraph or
    // the document ends. Prefer the smaller shift, shrink on ties; suppress
    // shifts that empty the chunk, overlap a neighbor, close a gap below the
    // merge tolerance, or drop the last seed.
    for (std::size_t c = 0; c < kept.size(); ++c) {
        ReferenceChunk& chunk = kept[c];
        const int prev_end = c > 0 ? kept[c - 1].last : 0;
        const int next_start = c + 1 < kept.size() ? kept[c + 1].first : n + 1;
        bool moved = false;

        if (!ref_is_para_start(doc, chunk.first)) {
            bool done = false;
            for (int dist = 1; dist <= config.max_boundary_shift && !done; ++dist) {
                const int options[2] = {chunk.first + dist, chunk.first - dist};
                for (int cand : options) {
                    if (cand < 1 || cand > n || cand > chunk.last) continue;
                    if (!ref_is_para_start(doc, cand)) continue;
                    if (c > 0 && cand - prev_end <= config.gap_tolerance) continue;
                    bool has_seed = false;
                    for (int r : chunk.seeds) {
                        if (r >= cand && r <= chunk.last) has_seed = true;
                    }
                    if (!has_seed) continue;
                    chunk.first = cand;
                    moved = true;
                    done = true;
                    break;
                }
            }
        }

        const bool end_ok =
            chunk.last == n || ref_is_para_start(doc, chunk.last + 1);
        if (!end_ok) {
            bool done = false;
            for (int dist = 1; dist <= config.max_boundary_shift && !done; ++dist) {
                const int options[2] = {chunk.last - dist, chunk.last + dist};
                for (int cand : options) {
                    if (cand < 1 || cand > n || cand < chunk.first) continue;
                    if (!(cand == n || ref_is_para_start(doc, cand + 1))) continue;
                    if (c + 1 < kept.size() && next_start - cand <= config.gap_tolerance) continue;
                    bool has_seed = false;
                    for (int r : chunk.seeds) {
                        if (r >= chunk.first && r <= cand) has_seed = true;
                    }
                    if (!has_seed) continue;
                    chunk.last = cand;
                    moved = true;
                    done = true;
                    break;
                }
            }
        }

        if (moved) {
            std::vector<int> inside;
            for (int r : chunk.seeds) {
                if (r >= chunk.first && r <= chunk.last) inside.push_back(r);
            }
            chunk.seeds = inside;
            chunk.score = ref_score(profile, chunk.first, chunk.last, chunk.seeds, config.decay);
        }
    }
    return kept;
}

std::vector<ReferenceChunk> reference_run(const qasc::Document& doc, const std::string& query,
                                          qasc::EmbeddingProvider& provider,
                                          const qasc::QascConfig& config) {
    std::vector<std::string> texts;
    for (const auto& s : doc.sentences) texts.push_back(s.text);
    const auto vectors = provider.embed_batch(texts);
    const auto query_vector = provider.embed(query);

    // Plain cosine, written out longhand.
    std::vector<double> profile;
    for (const auto& v : vectors) {
        double dot = 0.0;
        double nv = 0.0;
        double nq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            dot += v[i] * query_vector[i];
            nv += v[i] * v[i];
            nq += query_vector[i] * query_vector[i];
        }
        double sim = dot / (std::sqrt(nv) * std::sqrt(nq));
        if (sim > 1.0) sim = 1.0;
        if (sim < -1.0) sim = -1.0;
        profile.push_back(sim);
    }
    return reference_pipeline(doc, profile, config);
}

}  // namespace qasc_tests
