#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace sc2dec {

struct IndexedDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::string asm_text;  // kept so a hit can be rendered as a context example
    std::string source;
};

// BM25 over tokenized assembly. Lucene-style IDF, k1=1.5, b=0.75 defaults.
// Immutable after build; concurrent queries are safe.
struct AsmIndex {
    std::vector<IndexedDoc> documents;
    std::unordered_map<std::string, int> doc_freqs;  // term -> docs containing it
    double avg_doc_len = 0.0;
    double k1 = 1.5;
    double b = 0.75;
};

// Lowercases and splits on whitespace/punctuation, keeping `%`/`$` prefixes
// attached (register and immediate markers); numeric literals become `<num>`.
std::vector<std::string> tokenize_asm(const std::string& asm_text);

struct CorpusDoc {
    std::string doc_id;
    std::string asm_text;
    std::string source;
};

// Throws EmptyCorpus.
AsmIndex build_index(const std::vector<CorpusDoc>& corpus, double k1 = 1.5, double b = 0.75);

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

// IDF = ln(1 + (N - df + 0.5)/(df + 0.5)); each query-token occurrence
// contributes. Results sorted by (-score, doc_id), min(top_k, N) entries.
std::vector<ScoredDoc> bm25_query(const AsmIndex& index, const std::string& asm_text,
                                  int top_k);

const IndexedDoc* find_doc(const AsmIndex& index, const std::string& doc_id);

void save_index(const AsmIndex& index, const std::filesystem::path& path);
AsmIndex load_index(const std::filesystem::path& path);

}  // namespace sc2dec
