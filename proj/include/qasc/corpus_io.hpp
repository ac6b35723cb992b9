#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qasc/baselines.hpp"
#include "qasc/chunking.hpp"
#include "qasc/eval.hpp"
#include "qasc/segmenter.hpp"

namespace qasc::io {

/// Loads a corpus of newline-delimited JSON records {"id": string, "text":
/// string} and segments each document. Documents with fewer than
/// min_sentences sentences are dropped.
std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path, int min_sentences = 0);

/// Loads one plain-text UTF-8 file as a single document; the id is the file
/// stem.
Document load_text_file(const std::filesystem::path& path);

/// Dispatches on extension: ".jsonl" loads a corpus file, anything else a
/// single plain-text document.
std::vector<Document> load_input(const std::filesystem::path& path, int min_sentences = 0);

/// Queries file: one JSON record {"id","text","type"} per line, with type in
/// {factoid, topical, comparative, multi_hop}.
std::vector<eval::Query> load_queries_jsonl(const std::filesystem::path& path);

/// Gold file: one JSON record {"query_id","doc_id","relevant_sentences":[int]}
/// per line.
std::vector<eval::GoldAnnotation> load_gold_jsonl(const std::filesystem::path& path);

/// One chunk record per line:
/// {"doc_id","query_id","chunk_index","start_sentence","end_sentence",
///  "text","score","seeds","mode"}.
std::string chunk_records_jsonl(const ChunkSet& set, const Document& doc, OutputMode mode);

/// Baseline chunk records carry a "strategy" field naming the baseline and
/// its parameters instead of a query id.
std::string chunk_records_jsonl(const std::vector<baselines::BaselineChunk>& chunks,
                                const std::string& doc_id, const std::string& strategy_label);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qasc::io
