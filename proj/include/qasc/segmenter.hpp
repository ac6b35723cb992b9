#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace qasc {

/// One sentence of a segmented document. Indices are 1-based and follow
/// document order; char_span is a half-open byte range into the document's
/// raw text.
struct Sentence {
    int index = 0;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
    int token_count = 0;
};

/// A segmented document. Sentence spans are non-overlapping, strictly
/// increasing, and separated only by whitespace, so joining the spans with
/// the original inter-span bytes reconstructs raw_text exactly.
/// paragraph_starts holds the indices of sentences that open a paragraph;
/// it always contains 1 when the document is non-empty.
struct Document {
    std::string id;
    std::string raw_text;
    std::vector<Sentence> sentences;
    std::set<int> paragraph_starts;

    int sentence_count() const { return static_cast<int>(sentences.size()); }
    const Sentence& sentence(int index) const { return sentences[static_cast<std::size_t>(index - 1)]; }
};

/// Number of maximal non-whitespace runs in text.
int count_tokens(const std::string& text);

/// Deterministic rule-based sentence segmentation.
///
/// A sentence ends at '.', '!' or '?' (optionally followed by closing quotes
/// or brackets) when the terminator is followed by whitespace and then an
/// uppercase ASCII letter, a digit, or end of text. A built-in abbreviation
/// list ("e.g.", "i.e.", "Dr.", "Fig.", "et al.", ...) suppresses breaks
/// after '.'. One or more blank lines end the current sentence and start a
/// new paragraph. Empty or whitespace-only input yields zero sentences.
Document segment_document(const std::string& id, const std::string& raw_text);

/// Exact source text of the sentence range [first, last] (inclusive,
/// 1-based), i.e. the raw_text bytes from the first sentence's begin to the
/// last sentence's end.
std::string span_text(const Document& doc, int first, int last);

}  // namespace qasc
