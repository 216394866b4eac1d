#include "evipath/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace evipath {

namespace {

// English function words, alphanumeric forms only (the normalizer strips
// punctuation before stopword removal, so apostrophe variants can never
// occur as tokens). Contraction fragments (don, ll, ve, ...) are kept
// because the alphanumeric filter splits "don't" into "don" and "t".
const std::array<const char*, 153> kStopwords = {
    "a",        "about",    "above",   "after",   "again",      "against",  "ain",
    "all",      "am",       "an",      "and",     "any",        "are",      "aren",
    "as",       "at",       "be",      "because", "been",       "before",   "being",
    "below",    "between",  "both",    "but",     "by",         "can",      "couldn",
    "d",        "did",      "didn",    "do",      "does",       "doesn",    "doing",
    "don",      "down",     "during",  "each",    "few",        "for",      "from",
    "further",  "had",      "hadn",    "has",     "hasn",       "have",     "haven",
    "having",   "he",       "her",     "here",    "hers",       "herself",  "him",
    "himself",  "his",      "how",     "i",       "if",         "in",       "into",
    "is",       "isn",      "it",      "its",     "itself",     "just",     "ll",
    "m",        "ma",       "me",      "mightn",  "more",       "most",     "mustn",
    "my",       "myself",   "needn",   "no",      "nor",        "not",      "now",
    "o",        "of",       "off",     "on",      "once",       "only",     "or",
    "other",    "our",      "ours",    "ourselves", "out",      "over",     "own",
    "re",       "s",        "same",    "shan",    "she",        "should",   "shouldn",
    "so",       "some",     "such",    "t",       "than",       "that",     "the",
    "their",    "theirs",   "them",    "themselves", "then",    "there",    "these",
    "they",     "this",     "those",   "through", "to",         "too",      "under",
    "until",    "up",       "ve",      "very",    "was",        "wasn",     "we",
    "were",     "weren",    "what",    "when",    "where",      "which",    "while",
    "who",      "whom",     "why",     "will",    "with",       "won",      "wouldn",
    "y",        "you",      "your",    "yours",   "yourself",   "yourselves",
};

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(), kStopwords.end());
  return set;
}

// ---------------------------------------------------------------------------
// Porter stemmer. Straight transcription of the 1980 algorithm: measure-based
// conditions over the [C](VC)^m[V] decomposition, longest-suffix-wins within
// each step.

struct Stemmer {
  std::string w;

  explicit Stemmer(std::string word) : w(std::move(word)) {}

  bool is_consonant(std::size_t i) const {
    const char c = w[i];
    switch (c) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // m of the prefix w[0..len)
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(i)) ++i;      // skip initial C block
    while (i < len) {
      while (i < len && !is_consonant(i)) ++i;   // vowel block
      if (i >= len) break;
      ++m;                                       // closed a VC pair
      while (i < len && is_consonant(i)) ++i;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  // *d over the prefix of length len
  bool double_consonant(std::size_t len) const {
    if (len < 2) return false;
    return w[len - 1] == w[len - 2] && is_consonant(len - 1);
  }

  // *o over the prefix of length len: ends cvc, final consonant not w/x/y
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!is_consonant(len - 3) || is_consonant(len - 2) || !is_consonant(len - 1)) {
      return false;
    }
    const char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends_with(std::string_view suffix) const {
    return w.size() >= suffix.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), w.rbegin());
  }

  std::size_t stem_len(std::string_view suffix) const { return w.size() - suffix.size(); }

  void replace(std::string_view suffix, std::string_view with) {
    w.resize(w.size() - suffix.size());
    w.append(with);
  }

  void step1a() {
    if (!ends_with("s")) return;
    if (ends_with("sses")) {
      replace("sses", "ss");
    } else if (ends_with("ies")) {
      replace("ies", "i");
    } else if (!ends_with("ss")) {
      replace("s", "");
    }
  }

  void step1b() {
    if (ends_with("eed")) {
      if (measure(stem_len("eed")) > 0) {
        replace("eed", "ee");
      }
      return;
    }
    bool deleted = false;
    if (ends_with("ed") && has_vowel(stem_len("ed"))) {
      replace("ed", "");
      deleted = true;
    } else if (ends_with("ing") && has_vowel(stem_len("ing"))) {
      replace("ing", "");
      deleted = true;
    }
    if (!deleted) return;

    if (ends_with("at")) {
      replace("at", "ate");
    } else if (ends_with("bl")) {
      replace("bl", "ble");
    } else if (ends_with("iz")) {
      replace("iz", "ize");
    } else if (double_consonant(w.size())) {
      const char last = w.back();
      if (last != 'l' && last != 's' && last != 'z') {
        w.pop_back();
      }
    } else if (measure(w.size()) == 1 && cvc(w.size())) {
      w.push_back('e');
    }
  }

  void step1c() {
    if (ends_with("y") && has_vowel(stem_len("y"))) {
      w.back() = 'i';
    }
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  // Longest matching suffix decides the rule; the m>0 condition may still
  // veto the rewrite, in which case the step ends without change.
  void apply_table(std::initializer_list<Rule> rules) {
    const Rule* best = nullptr;
    for (const Rule& rule : rules) {
      if (ends_with(rule.suffix) && (best == nullptr || rule.suffix.size() > best->suffix.size())) {
        best = &rule;
      }
    }
    if (best != nullptr && measure(stem_len(best->suffix)) > 0) {
      replace(best->suffix, best->replacement);
    }
  }

  void step2() {
    apply_table({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                 {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
                 {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
                 {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                 {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
                 {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
                 {"iviti", "ive"},   {"biliti", "ble"}});
  }

  void step3() {
    apply_table({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                 {"ical", "ic"},  {"ful", ""},   {"ness", ""}});
  }

  void step4() {
    static constexpr std::string_view suffixes[] = {
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
        "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
    std::string_view best;
    for (std::string_view suffix : suffixes) {
      if (ends_with(suffix) && suffix.size() > best.size()) {
        best = suffix;
      }
    }
    if (best.empty()) return;
    const std::size_t stem = stem_len(best);
    if (measure(stem) <= 1) return;
    if (best == "ion" && !(stem > 0 && (w[stem - 1] == 's' || w[stem - 1] == 't'))) {
      return;
    }
    replace(best, "");
  }

  void step5a() {
    if (!ends_with("e")) return;
    const std::size_t stem = stem_len("e");
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !cvc(stem))) {
      w.pop_back();
    }
  }

  void step5b() {
    if (w.size() >= 2 && w.back() == 'l' && double_consonant(w.size()) &&
        measure(w.size()) > 1) {
      w.pop_back();
    }
  }
};

}  // namespace

std::string porter_stem(std::string word) {
  if (word.size() <= 2) {
    return word;
  }
  Stemmer st(std::move(word));
  st.step1a();
  st.step1b();
  st.step1c();
  st.step2();
  st.step3();
  st.step4();
  st.step5a();
  st.step5b();
  return std::move(st.w);
}

std::vector<std::string> normalize_text(std::string_view raw) {
  std::vector<std::string> terms;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (!is_stopword(current)) {
        terms.push_back(porter_stem(current));
      }
      current.clear();
    }
  };
  for (const char ch : raw) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isalnum(uc) && uc < 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  return terms;
}

const std::vector<std::string>& stopword_list() {
  static const std::vector<std::string> list(kStopwords.begin(), kStopwords.end());
  return list;
}

bool is_stopword(std::string_view term) {
  return stopword_set().count(term) != 0;
}

std::uint64_t stopword_checksum() {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](char c) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  };
  for (const char* word : kStopwords) {
    for (const char* p = word; *p != '\0'; ++p) {
      mix(*p);
    }
    mix('\n');
  }
  return hash;
}

std::string concat_query_passage(const std::string& query_text,
                                 const std::string& passage_text) {
  std::string out;
  out.reserve(query_text.size() + 1 + passage_text.size());
  out += query_text;
  out += ' ';
  out += passage_text;
  return out;
}

}  // namespace evipath
