#pragma once
// Deterministic text normalization for sparse retrieval: lowercase
// alphanumeric filtering, embedded stopword removal, Porter stemming.
// The stopword list ships inside the binary and is pinned by checksum so
// normalized output is bit-stable across builds and platforms.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evipath {

// Full pipeline: lowercase -> strip non-alphanumerics -> tokenize on
// whitespace -> drop stopwords -> Porter stem. Duplicates are preserved.
std::vector<std::string> normalize_text(std::string_view raw);

// Porter's 1980 stemming algorithm (the classic rule list, not the later
// extended variants). Expects a lowercase token; strings of length <= 2
// are returned unchanged.
std::string porter_stem(std::string word);

const std::vector<std::string>& stopword_list();
bool is_stopword(std::string_view term);

// FNV-1a 64-bit over "word\n" for each list entry in order.
std::uint64_t stopword_checksum();

// Query/passage concatenation used for contextual scoring and training
// export: query text, single space, passage text (sentences joined by
// single spaces). Fixed here so embedding cache keys and exported training
// records stay stable.
std::string concat_query_passage(const std::string& query_text,
                                 const std::string& passage_text);

}  // namespace evipath
