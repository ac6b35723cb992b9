#include "qasc/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace qasc {
namespace {

bool is_space(unsigned char c) {
    return std::isspace(c) != 0;
}

bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

// Closing quotes/brackets that may trail a sentence terminator.
bool is_closer(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

// Tokens (lowercased, terminal period included) after which a '.' never
// ends a sentence. Kept small and biased toward technical prose.
const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> kAbbrev = {
        "e.g.", "i.e.",  "cf.",   "vs.",  "al.",   "dr.",  "mr.",   "mrs.",
        "ms.",  "prof.", "st.",   "fig.", "figs.", "eq.",  "eqs.",  "sec.",
        "secs.", "no.",  "vol.",  "pp.",  "dept.", "univ.", "approx.",
    };
    return kAbbrev;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// The whitespace-delimited token ending at position `i` (inclusive).
std::string token_ending_at(const std::string& text, std::size_t begin, std::size_t i) {
    std::size_t s = i;
    while (s > begin && !is_space(static_cast<unsigned char>(text[s - 1]))) --s;
    return text.substr(s, i - s + 1);
}

bool abbreviation_before(const std::string& text, std::size_t para_begin, std::size_t dot) {
    std::string token = lowercase(token_ending_at(text, para_begin, dot));
    return abbreviations().count(token) > 0;
}

// Paragraph = maximal run of lines that are non-empty after trimming.
// Returned as half-open byte ranges over raw_text.
std::vector<std::pair<std::size_t, std::size_t>> paragraph_ranges(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> paras;
    std::size_t line_start = 0;
    std::size_t para_start = std::string::npos;
    const std::size_t n = text.size();

    for (std::size_t i = 0; i <= n; ++i) {
        if (i == n || text[i] == '\n') {
            bool blank = true;
            for (std::size_t j = line_start; j < i; ++j) {
                if (!is_space(static_cast<unsigned char>(text[j]))) {
                    blank = false;
                    break;
                }
            }
            if (!blank && para_start == std::string::npos) {
                para_start = line_start;
            }
            if (blank && para_start != std::string::npos) {
                paras.emplace_back(para_start, line_start);
                para_start = std::string::npos;
            }
            line_start = i + 1;
        }
    }
    if (para_start != std::string::npos) paras.emplace_back(para_start, n);
    return paras;
}

// Break positions inside one paragraph. A break position is the index just
// past a sentence's final byte (terminator plus trailing closers).
std::vector<std::size_t> sentence_breaks(const std::string& text, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> breaks;
    for (std::size_t i = begin; i < end; ++i) {
        if (!is_terminator(text[i])) continue;
        std::size_t j = i + 1;
        while (j < end && is_closer(text[j])) ++j;
        if (j >= end) break;  // paragraph end closes the sentence anyway
        if (!is_space(static_cast<unsigned char>(text[j]))) continue;
        std::size_t k = j;
        while (k < end && is_space(static_cast<unsigned char>(text[k]))) ++k;
        if (k < end) {
            unsigned char next = static_cast<unsigned char>(text[k]);
            if (!std::isupper(next) && !std::isdigit(next)) continue;
        }
        if (text[i] == '.' && abbreviation_before(text, begin, i)) continue;
        breaks.push_back(j);
    }
    breaks.push_back(end);
    return breaks;
}

void append_sentence(Document& doc, const std::string& text, std::size_t begin, std::size_t end) {
    while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin >= end) return;

    Sentence s;
    s.index = static_cast<int>(doc.sentences.size()) + 1;
    s.begin = begin;
    s.end = end;
    s.text = text.substr(begin, end - begin);
    s.token_count = count_tokens(s.text);
    doc.sentences.push_back(std::move(s));
}

}  // namespace

int count_tokens(const std::string& text) {
    int count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

Document segment_document(const std::string& id, const std::string& raw_text) {
    Document doc;
    doc.id = id;
    doc.raw_text = raw_text;

    for (const auto& [para_begin, para_end] : paragraph_ranges(raw_text)) {
        const int first_new = doc.sentence_count() + 1;
        std::size_t start = para_begin;
        for (std::size_t brk : sentence_breaks(raw_text, para_begin, para_end)) {
            append_sentence(doc, raw_text, start, brk);
            start = brk;
        }
        if (doc.sentence_count() >= first_new) doc.paragraph_starts.insert(first_new);
    }
    return doc;
}

std::string span_text(const Document& doc, int first, int last) {
    const Sentence& a = doc.sentence(first);
    const Sentence& b = doc.sentence(last);
    return doc.raw_text.substr(a.begin, b.end - a.begin);
}

}  // namespace qasc
