#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "trendlex/corpus.hpp"

namespace trendlex {

enum class Pos { noun, propn, adj, verb, other };

std::string_view to_string(Pos pos);
Pos parse_pos(std::string_view tag);

/// True for the classes allowed inside a candidate n-gram.
constexpr bool is_content_pos(Pos pos) noexcept { return pos != Pos::other; }

struct Token {
    std::string surface;  // lowercased
    std::string lemma;
    Pos pos = Pos::noun;
    std::size_t position = 0;  // index in ProcessedPost::tokens

    bool operator==(const Token&) const = default;
};

struct ProcessedPost {
    std::string post_id;
    std::vector<Token> tokens;         // URLs removed, lowercased, punctuation dropped
    std::vector<std::size_t> content;  // indices into tokens, stopwords removed

    const Token& content_token(std::size_t i) const { return tokens[content[i]]; }
    std::vector<std::string> lemmas() const;
    std::vector<std::string> content_lemmas() const;
};

/// Inflected form -> lemma, identity fallback.
class Lemmatizer {
public:
    Lemmatizer() = default;
    static Lemmatizer load(const std::string& tsv_path);
    static Lemmatizer parse(std::string_view tsv);

    void add(std::string form, std::string lemma);
    std::string lemmatize(std::string_view form) const;
    std::size_t size() const noexcept { return table_.size(); }

private:
    std::unordered_map<std::string, std::string> table_;
};

/// Lexicon tagger: word<TAB>TAG lines. Lookup by surface, then by lemma.
/// All-digit tokens are OTHER; anything else unknown is NOUN.
class LexiconTagger {
public:
    LexiconTagger() = default;
    static LexiconTagger load(const std::string& tsv_path);
    static LexiconTagger parse(std::string_view tsv);

    void add(std::string word, Pos pos);
    Pos tag(const Token& token) const;
    std::size_t size() const noexcept { return lexicon_.size(); }

private:
    std::unordered_map<std::string, Pos> lexicon_;
};

using StopwordSet = std::unordered_set<std::string>;

struct LanguageResources {
    StopwordSet stopwords;
    Lemmatizer lemmatizer;
    LexiconTagger tagger;

    /// Loads stopwords.txt, lemmas.tsv and tagger.tsv from `data_dir`.
    static LanguageResources load(const std::string& data_dir);
};

/// Directory of the bundled language data (compile-time default,
/// overridable through TRENDLEX_DATA_DIR).
std::string default_data_dir();

/// Removes http(s):// and www. URLs; replaced by a single space.
std::string strip_urls(std::string_view text);

/// Lowercased word tokens of `text` (URLs must already be stripped).
std::vector<std::string> tokenize(std::string_view text);

/// Fills the pos field of every token.
void pos_tag(std::vector<Token>& tokens, const LexiconTagger& tagger);

ProcessedPost preprocess_post(const Post& post, const LanguageResources& res);
ProcessedPost preprocess_text(std::string_view text, const LanguageResources& res,
                              std::string post_id = {});

/// Lemma form of a lexicon expression: content lemmas joined by spaces.
std::string lemma_form(std::string_view expression, const LanguageResources& res);

struct NgramOccurrence {
    std::string term;          // lemmas joined with single spaces
    std::size_t n = 0;         // 2 or 3
    std::size_t content_begin = 0;  // index into ProcessedPost::content
};

/// Every width-2 and width-3 window over the content tokens whose tokens are
/// all NOUN/PROPN/ADJ/VERB, in window order (repeats included).
std::vector<NgramOccurrence> candidate_ngram_occurrences(const ProcessedPost& post);

std::set<std::string> extract_candidate_ngrams(const ProcessedPost& post);

}  // namespace trendlex

namespace trendlex {

/// Start indices (into content) of every contiguous match of `lemmas`
/// against the post's content lemma sequence.
std::vector<std::size_t> find_term(const ProcessedPost& post,
                                   const std::vector<std::string>& lemmas);

}  // namespace trendlex
