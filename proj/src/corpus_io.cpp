#include "qasc/corpus_io.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qasc/errors.hpp"

namespace qasc::io {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_line(const std::filesystem::path& path, const std::string& line, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": invalid JSON: " + e.what());
    }
}

std::string require_string(const json& record, const char* field, const std::filesystem::path& path,
                           std::size_t line_no) {
    if (!record.contains(field) || !record[field].is_string()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": missing string field \"" + field + "\"");
    }
    return record[field].get<std::string>();
}

template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fn(parse_line(path, line, line_no), line_no);
    }
}

}  // namespace

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path, int min_sentences) {
    std::vector<Document> corpus;
    for_each_record(path, [&](const json& record, std::size_t line_no) {
        const std::string id = require_string(record, "id", path, line_no);
        const std::string text = require_string(record, "text", path, line_no);
        Document doc = segment_document(id, text);
        if (doc.sentence_count() >= min_sentences) corpus.push_back(std::move(doc));
    });
    return corpus;
}

Document load_text_file(const std::filesystem::path& path) {
    return segment_document(path.stem().string(), read_file(path));
}

std::vector<Document> load_input(const std::filesystem::path& path, int min_sentences) {
    if (path.extension() == ".jsonl") return load_corpus_jsonl(path, min_sentences);
    std::vector<Document> corpus;
    Document doc = load_text_file(path);
    if (doc.sentence_count() >= min_sentences) corpus.push_back(std::move(doc));
    return corpus;
}

std::vector<eval::Query> load_queries_jsonl(const std::filesystem::path& path) {
    static const std::vector<std::string> kTypes = {"factoid", "topical", "comparative",
                                                    "multi_hop"};
    std::vector<eval::Query> queries;
    for_each_record(path, [&](const json& record, std::size_t line_no) {
        eval::Query q;
        q.id = require_string(record, "id", path, line_no);
        q.text = require_string(record, "text", path, line_no);
        q.type = require_string(record, "type", path, line_no);
        if (std::find(kTypes.begin(), kTypes.end(), q.type) == kTypes.end()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": unknown query type \"" + q.type + "\"");
        }
        queries.push_back(std::move(q));
    });
    return queries;
}

std::vector<eval::GoldAnnotation> load_gold_jsonl(const std::filesystem::path& path) {
    std::vector<eval::GoldAnnotation> gold;
    for_each_record(path, [&](const json& record, std::size_t line_no) {
        eval::GoldAnnotation g;
        g.query_id = require_string(record, "query_id", path, line_no);
        g.doc_id = require_string(record, "doc_id", path, line_no);
        if (!record.contains("relevant_sentences") || !record["relevant_sentences"].is_array() ||
            record["relevant_sentences"].empty()) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": \"relevant_sentences\" must be a non-empty array");
        }
        for (const auto& s : record["relevant_sentences"]) {
            if (!s.is_number_integer()) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": \"relevant_sentences\" must hold integers");
            }
            g.relevant_sentences.insert(s.get<int>());
        }
        gold.push_back(std::move(g));
    });
    return gold;
}

std::string chunk_records_jsonl(const ChunkSet& set, const Document& doc, OutputMode mode) {
    std::string out;
    if (mode == OutputMode::chunk_set) {
        for (std::size_t i = 0; i < set.chunks.size(); ++i) {
            const CandidateChunk& c = set.chunks[i];
            ordered_json record;
            record["doc_id"] = set.doc_id;
            record["query_id"] = set.query_id;
            record["chunk_index"] = i;
            record["start_sentence"] = c.span.first;
            record["end_sentence"] = c.span.last;
            record["text"] = span_text(doc, c.span.first, c.span.last);
            record["score"] = c.aggregate_score;
            record["seeds"] = c.seed_indices;
            record["mode"] = "chunk_set";
            out += record.dump() + "\n";
        }
        return out;
    }

    ordered_json record;
    record["doc_id"] = set.doc_id;
    record["query_id"] = set.query_id;
    record["chunk_index"] = 0;
    record["start_sentence"] = set.chunks.empty() ? 0 : set.chunks.front().span.first;
    record["end_sentence"] = set.chunks.empty() ? 0 : set.chunks.back().span.last;
    record["text"] = compose_summary(set, doc);
    double best = 0.0;
    std::vector<int> seeds;
    for (const auto& c : set.chunks) {
        best = std::max(best, c.aggregate_score);
        seeds.insert(seeds.end(), c.seed_indices.begin(), c.seed_indices.end());
    }
    std::sort(seeds.begin(), seeds.end());
    record["score"] = best;
    record["seeds"] = seeds;
    record["mode"] = "composed_summary";
    return record.dump() + "\n";
}

std::string chunk_records_jsonl(const std::vector<baselines::BaselineChunk>& chunks,
                                const std::string& doc_id, const std::string& strategy_label) {
    std::string out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const baselines::BaselineChunk& c = chunks[i];
        ordered_json record;
        record["doc_id"] = doc_id;
        record["chunk_index"] = i;
        record["start_sentence"] = c.start_sentence;
        record["end_sentence"] = c.end_sentence;
        record["text"] = c.text;
        record["score"] = 0.0;
        record["seeds"] = json::array();
        record["mode"] = "chunk_set";
        record["strategy"] = strategy_label;
        out += record.dump() + "\n";
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace qasc::io
