#include "sc2dec/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sc2dec/errors.hpp"

namespace sc2dec {

namespace {

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// "0x1f" and "123" are numeric; hex-alphabet words like "add" are not.
bool is_numeric_literal(const std::string& t) {
    if (t.empty()) return false;
    if (t.size() > 2 && t[0] == '0' && t[1] == 'x') {
        return std::all_of(t.begin() + 2, t.end(), [](unsigned char c) {
            return std::isdigit(c) || (c >= 'a' && c <= 'f');
        });
    }
    return std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::vector<std::string> tokenize_asm(const std::string& asm_text) {
    std::vector<std::string> tokens;
    std::string current;
    char prefix = 0;

    auto flush = [&] {
        if (!current.empty()) {
            std::string body = is_numeric_literal(current) ? "<num>" : current;
            tokens.push_back(prefix ? std::string(1, prefix) + body : body);
        }
        current.clear();
        prefix = 0;
    };

    for (char raw : asm_text) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (c == '%' || c == '$') {
            flush();
            prefix = c;
        } else if (is_token_char(c)) {
            current += c;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

AsmIndex build_index(const std::vector<CorpusDoc>& corpus, double k1, double b) {
    if (corpus.empty()) throw EmptyCorpus();

    AsmIndex index;
    index.k1 = k1;
    index.b = b;

    size_t total_len = 0;
    for (const CorpusDoc& doc : corpus) {
        IndexedDoc indexed;
        indexed.doc_id = doc.doc_id;
        indexed.tokens = tokenize_asm(doc.asm_text);
        indexed.asm_text = doc.asm_text;
        indexed.source = doc.source;
        total_len += indexed.tokens.size();

        std::unordered_map<std::string, bool> seen;
        for (const std::string& t : indexed.tokens) {
            if (!seen.emplace(t, true).second) continue;
            ++index.doc_freqs[t];
        }
        index.documents.push_back(std::move(indexed));
    }
    index.avg_doc_len = static_cast<double>(total_len) / static_cast<double>(corpus.size());
    return index;
}

std::vector<ScoredDoc> bm25_query(const AsmIndex& index, const std::string& asm_text,
                                  int top_k) {
    const auto n_docs = static_cast<double>(index.documents.size());
    std::vector<std::string> query = tokenize_asm(asm_text);

    std::vector<ScoredDoc> scored;
    scored.reserve(index.documents.size());
    for (const IndexedDoc& doc : index.documents) {
        std::unordered_map<std::string, int> tf;
        for (const std::string& t : doc.tokens) ++tf[t];

        double dl = static_cast<double>(doc.tokens.size());
        double norm = index.k1 * (1.0 - index.b + index.b * dl / index.avg_doc_len);

        double score = 0.0;
        for (const std::string& t : query) {
            auto tf_it = tf.find(t);
            if (tf_it == tf.end()) continue;
            auto df_it = index.doc_freqs.find(t);
            double df = df_it == index.doc_freqs.end() ? 0.0 : df_it->second;
            double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
            double f = tf_it->second;
            score += idf * (f * (index.k1 + 1.0)) / (f + norm);
        }
        scored.push_back({doc.doc_id, score});
    }

    std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    size_t keep = std::min<size_t>(std::max(top_k, 0), scored.size());
    scored.resize(keep);
    return scored;
}

const IndexedDoc* find_doc(const AsmIndex& index, const std::string& doc_id) {
    for (const IndexedDoc& doc : index.documents)
        if (doc.doc_id == doc_id) return &doc;
    return nullptr;
}

void save_index(const AsmIndex& index, const std::filesystem::path& path) {
    nlohmann::json docs = nlohmann::json::array();
    for (const IndexedDoc& doc : index.documents) {
        docs.push_back({{"doc_id", doc.doc_id},
                        {"tokens", doc.tokens},
                        {"asm", doc.asm_text},
                        {"source", doc.source}});
    }
    nlohmann::json j = {{"k1", index.k1},
                        {"b", index.b},
                        {"avg_doc_len", index.avg_doc_len},
                        {"doc_freqs", index.doc_freqs},
                        {"documents", docs}};
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

AsmIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open index file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);

    AsmIndex index;
    index.k1 = j.at("k1").get<double>();
    index.b = j.at("b").get<double>();
    index.avg_doc_len = j.at("avg_doc_len").get<double>();
    index.doc_freqs = j.at("doc_freqs").get<std::unordered_map<std::string, int>>();
    for (const auto& doc : j.at("documents")) {
        IndexedDoc indexed;
        indexed.doc_id = doc.at("doc_id").get<std::string>();
        indexed.tokens = doc.at("tokens").get<std::vector<std::string>>();
        indexed.asm_text = doc.at("asm").get<std::string>();
        indexed.source = doc.at("source").get<std::string>();
        index.documents.push_back(std::move(indexed));
    }
    return index;
}

}  // namespace sc2dec
