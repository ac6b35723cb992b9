#include "qasc/chunking.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>

namespace qasc {
namespace {

void rescore(CandidateChunk& chunk, const SimilarityProfile& profile, double decay) {
    chunk.aggregate_score =
        aggregate_score(chunk.span, profile, multi_seed_weights(chunk.span, chunk.seed_indices, decay));
}

std::vector<int> union_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool start_aligned(const Document& doc, int index) {
    return doc.paragraph_starts.count(index) > 0;
}

bool end_aligned(const Document& doc, int index) {
    return index == doc.sentence_count() || doc.paragraph_starts.count(index + 1) > 0;
}

}  // namespace

bool SeedSet::contains(int index) const {
    return std::any_of(seeds.begin(), seeds.end(),
                       [index](const Seed& s) { return s.index == index; });
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DegenerateInputError("percentile: empty input");
    if (!(p >= 0.0 && p <= 100.0)) throw ValidationError("percentile: p outside [0, 100]");

    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double rank = (p / 100.0) * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= n) return values[n - 1];
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

SeedSet select_seeds(const SimilarityProfile& profile, double p) {
    SeedSet set;
    set.threshold = percentile(profile.scores, p);
    for (int i = 1; i <= profile.size(); ++i) {
        if (profile.at(i) >= set.threshold) set.seeds.push_back({i, profile.at(i)});
    }
    return set;
}

SeedSet select_seeds_topk(const SimilarityProfile& profile, int k) {
    const int n = profile.size();
    if (k < 1 || k > n) {
        throw ValidationError("select_seeds_topk: k = " + std::to_string(k) +
                              " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (profile.at(a) != profile.at(b)) return profile.at(a) > profile.at(b);
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());

    SeedSet set;
    set.threshold = profile.at(order.front());
    for (int i : order) {
        set.threshold = std::min(set.threshold, profile.at(i));
        set.seeds.push_back({i, profile.at(i)});
    }
    return set;
}

SentenceSpan expand_window_fixed(int seed, int radius, int sentence_count) {
    return {std::max(1, seed - radius), std::min(sentence_count, seed + radius)};
}

SentenceSpan expand_window_adaptive(int seed, const SimilarityProfile& profile,
                                    double boundary_threshold) {
    const int n = profile.size();
    int first = seed;
    while (first > 1 && profile.at(first - 1) >= boundary_threshold) --first;
    int last = seed;
    while (last < n && profile.at(last + 1) >= boundary_threshold) ++last;
    return {first, last};
}

std::vector<double> positional_weights(SentenceSpan span, int seed, double decay) {
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(span.length()));
    for (int i = span.first; i <= span.last; ++i) {
        weights.push_back(std::exp(-decay * std::abs(i - seed)));
    }
    return weights;
}

std::vector<double> multi_seed_weights(SentenceSpan span, const std::vector<int>& seeds,
                                       double decay) {
    // max over seeds of exp(-decay * |i - r|) = exp(-decay * nearest-seed
    // distance); two sweeps find that distance in linear time.
    const auto len = static_cast<std::size_t>(span.length());
    std::vector<int> distance(len, INT_MAX);
    for (int r : seeds) {
        if (r < span.first) {
            distance[0] = std::min(distance[0], span.first - r);
        } else if (r > span.last) {
            distance[len - 1] = std::min(distance[len - 1], r - span.last);
        } else {
            distance[static_cast<std::size_t>(r - span.first)] = 0;
        }
    }
    for (std::size_t i = 1; i < len; ++i) {
        if (distance[i - 1] != INT_MAX) distance[i] = std::min(distance[i], distance[i - 1] + 1);
    }
    for (std::size_t i = len - 1; i-- > 0;) {
        if (distance[i + 1] != INT_MAX) distance[i] = std::min(distance[i], distance[i + 1] + 1);
    }

    std::vector<double> weights(len);
    for (std::size_t i = 0; i < len; ++i) {
        weights[i] = distance[i] == INT_MAX ? 0.0 : std::exp(-decay * distance[i]);
    }
    return weights;
}

double aggregate_score(SentenceSpan span, const SimilarityProfile& profile,
                       const std::vector<double>& weights) {
    double weighted = 0.0;
    double total = 0.0;
    for (int i = span.first; i <= span.last; ++i) {
        const double w = weights[static_cast<std::size_t>(i - span.first)];
        weighted += w * profile.at(i);
        total += w;
    }
    return weighted / total;
}

std::vector<CandidateChunk> filter_candidates(std::vector<CandidateChunk> candidates,
                                              double seed_threshold, double threshold_factor) {
    const double cutoff = threshold_factor * seed_threshold;
    std::erase_if(candidates,
                  [cutoff](const CandidateChunk& c) { return c.aggregate_score < cutoff; });
    return candidates;
}

ChunkSet merge_chunks(std::vector<CandidateChunk> candidates, int gap_tolerance,
                      const SimilarityProfile& profile, double decay) {
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.span.first != b.span.first) return a.span.first < b.span.first;
        return a.span.last < b.span.last;
    });

    // Sorted by start, so a merge can only enable further merges to the
    // right of the merged chunk; one forward pass that re-checks in place
    // reaches the fixpoint. Merge decisions are purely positional, so merged
    // chunks are rescored once at the end.
    std::vector<CandidateChunk> merged;
    std::vector<bool> dirty;
    for (auto& c : candidates) {
        if (!merged.empty() && c.span.first - merged.back().span.last <= gap_tolerance) {
            CandidateChunk& prev = merged.back();
            prev.span.last = std::max(prev.span.last, c.span.last);
            prev.seed_indices = union_sorted(prev.seed_indices, c.seed_indices);
            prev.adaptive_radii.reset();
            dirty.back() = true;
        } else {
            merged.push_back(std::move(c));
            dirty.push_back(false);
        }
    }
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (dirty[i]) rescore(merged[i], profile, decay);
    }
    candidates = std::move(merged);

    ChunkSet set;
    set.doc_id = profile.doc_id;
    set.query_id = profile.query_id;
    set.chunks = std::move(candidates);
    return set;
}

ChunkSet adjust_boundaries(ChunkSet chunks, const Document& doc, int max_shift,
                           const SimilarityProfile& profile, double decay,
                           int gap_tolerance) {
    const int n = doc.sentence_count();
    auto& list = chunks.chunks;

    for (std::size_t c = 0; c < list.size(); ++c) {
        CandidateChunk& chunk = list[c];
        const int prev_end = c > 0 ? list[c - 1].span.last : 0;
        const int next_start = c + 1 < list.size() ? list[c + 1].span.first : n + 1;
        bool moved = false;

        if (!start_aligned(doc, chunk.span.first)) {
            const int a = chunk.span.first;
            for (int dist = 1; dist <= max_shift; ++dist) {
                bool applied = false;
                for (int candidate : {a + dist, a - dist}) {  // shrink wins the tie
                    if (candidate < 1 || candidate > n) continue;
                    if (!start_aligned(doc, candidate)) continue;
                    if (candidate > chunk.span.last) continue;
                    if (candidate - prev_end <= gap_tolerance && c > 0) continue;
                    const bool keeps_seed = std::any_of(
                        chunk.seed_indices.begin(), chunk.seed_indices.end(),
                        [&](int s) { return s >= candidate && s <= chunk.span.last; });
                    if (!keeps_seed) continue;
                    chunk.span.first = candidate;
                    moved = applied = true;
                    break;
                }
                if (applied) break;
            }
        }

        if (!end_aligned(doc, chunk.span.last)) {
            const int b = chunk.span.last;
            for (int dist = 1; dist <= max_shift; ++dist) {
                bool applied = false;
                for (int candidate : {b - dist, b + dist}) {  // shrink wins the tie
                    if (candidate < 1 || candidate > n) continue;
                    if (!end_aligned(doc, candidate)) continue;
                    if (candidate < chunk.span.first) continue;
                    if (next_start - candidate <= gap_tolerance && c + 1 < list.size()) continue;
                    const bool keeps_seed = std::any_of(
                        chunk.seed_indices.begin(), chunk.seed_indices.end(),
                        [&](int s) { return s >= chunk.span.first && s <= candidate; });
                    if (!keeps_seed) continue;
                    chunk.span.last = candidate;
                    moved = applied = true;
                    break;
                }
                if (applied) break;
            }
        }

        if (moved) {
            std::erase_if(chunk.seed_indices, [&](int s) {
                return s < chunk.span.first || s > chunk.span.last;
            });
            chunk.adaptive_radii.reset();
            rescore(chunk, profile, decay);
        }
    }
    return chunks;
}

ChunkSet run_qasc_on_profile(const Document& doc, const SimilarityProfile& profile,
                             const QascConfig& config) {
    config.validate();
    if (doc.sentence_count() < 1) throw ValidationError("run_qasc: document has no sentences");
    if (profile.size() != doc.sentence_count()) {
        throw ValidationError("run_qasc: profile length " + std::to_string(profile.size()) +
                              " does not match sentence count " +
                              std::to_string(doc.sentence_count()));
    }

    const SeedSet seeds = select_seeds(profile, config.seed_percentile);
    const double boundary_threshold =
        config.window_mode == WindowMode::adaptive
            ? percentile(profile.scores, config.boundary_percentile)
            : 0.0;

    std::vector<CandidateChunk> candidates;
    candidates.reserve(seeds.seeds.size());
    for (const Seed& seed : seeds.seeds) {
        CandidateChunk c;
        if (config.window_mode == WindowMode::fixed) {
            c.span = expand_window_fixed(seed.index, config.window_radius, doc.sentence_count());
        } else {
            c.span = expand_window_adaptive(seed.index, profile, boundary_threshold);
            c.adaptive_radii = {seed.index - c.span.first, c.span.last - seed.index};
        }
        c.seed_indices = {seed.index};
        candidates.push_back(std::move(c));
    }

    // Distinct seeds can expand to identical spans (adaptive plateaus, edge
    // clamping); collapse them before scoring so each span is counted once.
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.span.first != b.span.first) return a.span.first < b.span.first;
        return a.span.last < b.span.last;
    });
    std::vector<CandidateChunk> unique;
    for (auto& c : candidates) {
        if (!unique.empty() && unique.back().span == c.span) {
            unique.back().seed_indices = union_sorted(unique.back().seed_indices, c.seed_indices);
            unique.back().adaptive_radii.reset();
        } else {
            unique.push_back(std::move(c));
        }
    }
    for (auto& c : unique) rescore(c, profile, config.decay);

    ChunkSet merged = merge_chunks(
        filter_candidates(std::move(unique), seeds.threshold, config.chunk_threshold_factor),
        config.gap_tolerance, profile, config.decay);
    merged.doc_id = doc.id;
    merged.query_id = profile.query_id;

    return adjust_boundaries(std::move(merged), doc, config.max_boundary_shift, profile,
                             config.decay, config.gap_tolerance);
}

ChunkSet run_qasc(const Document& doc, const std::string& query_text,
                  EmbeddingProvider& provider, const QascConfig& config,
                  const std::string& query_id) {
    if (doc.sentence_count() < 1) throw ValidationError("run_qasc: document has no sentences");

    std::vector<std::string> texts;
    texts.reserve(doc.sentences.size());
    for (const auto& s : doc.sentences) texts.push_back(s.text);

    const std::vector<EmbeddingVector> doc_vectors = provider.embed_batch(texts);
    const EmbeddingVector query_vector = provider.embed(query_text);
    const SimilarityProfile profile =
        similarity_profile(doc_vectors, query_vector, doc.id, query_id);
    return run_qasc_on_profile(doc, profile, config);
}

std::string compose_summary(const ChunkSet& chunks, const Document& doc) {
    std::string out;
    for (std::size_t i = 0; i < chunks.chunks.size(); ++i) {
        const CandidateChunk& chunk = chunks.chunks[i];
        if (i > 0) {
            const bool adjacent = chunk.span.first == chunks.chunks[i - 1].span.last + 1;
            out += adjacent ? " " : " [...] ";
        }
        out += span_text(doc, chunk.span.first, chunk.span.last);
    }
    return out;
}

}  // namespace qasc
