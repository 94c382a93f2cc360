#include "trendlex/preprocess.hpp"

#include <cstdlib>
#include <sstream>

#include "trendlex/error.hpp"
#include "trendlex/text.hpp"

#ifndef TRENDLEX_DEFAULT_DATA_DIR
#define TRENDLEX_DEFAULT_DATA_DIR "data"
#endif

namespace trendlex {

std::string_view to_string(Pos pos) {
    switch (pos) {
        case Pos::noun: return "NOUN";
        case Pos::propn: return "PROPN";
        case Pos::adj: return "ADJ";
        case Pos::verb: return "VERB";
        case Pos::other: return "OTHER";
    }
    return "OTHER";
}

Pos parse_pos(std::string_view tag) {
    if (tag == "NOUN") return Pos::noun;
    if (tag == "PROPN") return Pos::propn;
    if (tag == "ADJ") return Pos::adj;
    if (tag == "VERB") return Pos::verb;
    if (tag == "OTHER") return Pos::other;
    throw InvalidArgument("unknown POS tag \"" + std::string(tag) + "\"");
}

std::vector<std::string> ProcessedPost::lemmas() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.lemma);
    return out;
}

std::vector<std::string> ProcessedPost::content_lemmas() const {
    std::vector<std::string> out;
    out.reserve(content.size());
    for (auto i : content) out.push_back(tokens[i].lemma);
    return out;
}

namespace {

template <class F>
void for_each_tsv_row(std::string_view tsv, const std::string& name, F&& f) {
    std::istringstream in{std::string(tsv)};
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (auto t = text::trim(line); t.empty() || t.front() == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(name, no, "expected two TAB-separated columns");
        auto a = text::trim(std::string_view(line).substr(0, tab));
        auto b = text::trim(std::string_view(line).substr(tab + 1));
        if (a.empty() || b.empty()) throw ParseError(name, no, "empty column");
        f(std::string(a), std::string(b), no);
    }
}

}  // namespace

Lemmatizer Lemmatizer::parse(std::string_view tsv) {
    Lemmatizer l;
    for_each_tsv_row(tsv, "lemmas.tsv", [&](std::string form, std::string lemma, std::size_t) {
        l.add(text::lower(form), text::lower(lemma));
    });
    return l;
}

Lemmatizer Lemmatizer::load(const std::string& tsv_path) { return parse(text::read_file(tsv_path)); }

void Lemmatizer::add(std::string form, std::string lemma) { table_[std::move(form)] = std::move(lemma); }

std::string Lemmatizer::lemmatize(std::string_view form) const {
    auto it = table_.find(std::string(form));
    return it == table_.end() ? std::string(form) : it->second;
}

LexiconTagger LexiconTagger::parse(std::string_view tsv) {
    LexiconTagger t;
    for_each_tsv_row(tsv, "tagger.tsv", [&](std::string word, std::string tag, std::size_t no) {
        try {
            t.add(text::lower(word), parse_pos(tag));
        } catch (const InvalidArgument& e) {
            throw ParseError("tagger.tsv", no, e.what());
        }
    });
    return t;
}

LexiconTagger LexiconTagger::load(const std::string& tsv_path) { return parse(text::read_file(tsv_path)); }

void LexiconTagger::add(std::string word, Pos pos) { lexicon_[std::move(word)] = pos; }

Pos LexiconTagger::tag(const Token& token) const {
    if (auto it = lexicon_.find(token.surface); it != lexicon_.end()) return it->second;
    if (auto it = lexicon_.find(token.lemma); it != lexicon_.end()) return it->second;
    bool digits = !token.surface.empty();
    for (unsigned char c : token.surface) digits = digits && std::isdigit(c);
    return digits ? Pos::other : Pos::noun;
}

LanguageResources LanguageResources::load(const std::string& data_dir) {
    LanguageResources res;
    for (auto& w : text::read_list_file(data_dir + "/stopwords.txt")) res.stopwords.insert(text::lower(w));
    res.lemmatizer = Lemmatizer::load(data_dir + "/lemmas.tsv");
    res.tagger = LexiconTagger::load(data_dir + "/tagger.tsv");
    return res;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("TRENDLEX_DATA_DIR"); env && *env) return env;
    return TRENDLEX_DEFAULT_DATA_DIR;
}

namespace {

bool starts_with_ci(std::string_view s, std::size_t at, std::string_view prefix) {
    if (s.size() - at < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        auto c = static_cast<unsigned char>(s[at + i]);
        if (std::tolower(c) != prefix[i]) return false;
    }
    return true;
}

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

}  // namespace

std::string strip_urls(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const bool boundary = i == 0 || is_space(static_cast<unsigned char>(s[i - 1])) ||
                              s[i - 1] == '(' || s[i - 1] == '<' || s[i - 1] == '"';
        if (boundary && (starts_with_ci(s, i, "http://") || starts_with_ci(s, i, "https://") ||
                         starts_with_ci(s, i, "www."))) {
            while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
            out += ' ';
            continue;
        }
        out += s[i++];
    }
    return out;
}

namespace {

enum class CharClass { word, apostrophe, separator };

// Classifies the code point starting at s[i] and reports its byte length.
CharClass classify(std::string_view s, std::size_t i, std::size_t& len) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        len = 1;
        if (std::isalnum(c)) return CharClass::word;
        if (c == '\'') return CharClass::apostrophe;
        return CharClass::separator;
    }
    len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
    if (i + len > s.size()) len = s.size() - i;
    auto b1 = len > 1 ? static_cast<unsigned char>(s[i + 1]) : 0;
    auto b2 = len > 2 ? static_cast<unsigned char>(s[i + 2]) : 0;
    if (c == 0xE2 && b1 == 0x80 && (b2 == 0x98 || b2 == 0x99)) return CharClass::apostrophe;  // ‘ ’
    if (c == 0xE2 && (b1 == 0x80 || b1 == 0x81)) return CharClass::separator;  // general punctuation
    if (c == 0xC2) return CharClass::separator;  // Latin-1 punctuation and symbols
    if (c == 0xC3 && (b1 == 0x97 || b1 == 0xB7)) return CharClass::separator;  // × ÷
    if (c >= 0xF0) return CharClass::separator;  // emoji and other astral symbols
    if (c == 0xE2) return CharClass::separator;  // arrows, math, box drawing, dingbats
    if (c == 0xE3 && b1 == 0x80) return CharClass::separator;  // CJK punctuation
    return CharClass::word;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto b = cur.find_first_not_of('\'');
        auto e = cur.find_last_not_of('\'');
        if (b != std::string::npos) out.push_back(text::lower(std::string_view(cur).substr(b, e - b + 1)));
        cur.clear();
    };
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len = 1;
        switch (classify(s, i, len)) {
            case CharClass::word: cur.append(s.substr(i, len)); break;
            case CharClass::apostrophe: cur += '\''; break;
            case CharClass::separator: flush(); break;
        }
        i += len;
    }
    flush();
    return out;
}

void pos_tag(std::vector<Token>& tokens, const LexiconTagger& tagger) {
    for (auto& t : tokens) t.pos = tagger.tag(t);
}

ProcessedPost preprocess_text(std::string_view raw, const LanguageResources& res, std::string post_id) {
    ProcessedPost out;
    out.post_id = std::move(post_id);
    auto words = tokenize(strip_urls(raw));
    out.tokens.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        Token t;
        t.lemma = res.lemmatizer.lemmatize(words[i]);
        t.surface = std::move(words[i]);
        t.position = i;
        out.tokens.push_back(std::move(t));
    }
    pos_tag(out.tokens, res.tagger);
    for (std::size_t i = 0; i < out.tokens.size(); ++i)
        if (!res.stopwords.contains(out.tokens[i].surface)) out.content.push_back(i);
    return out;
}

ProcessedPost preprocess_post(const Post& post, const LanguageResources& res) {
    return preprocess_text(post.text, res, post.id);
}

std::string lemma_form(std::string_view expression, const LanguageResources& res) {
    return text::join(preprocess_text(expression, res).content_lemmas());
}

std::vector<NgramOccurrence> candidate_ngram_occurrences(const ProcessedPost& post) {
    std::vector<NgramOccurrence> out;
    const auto& c = post.content;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!is_content_pos(post.tokens[c[i]].pos)) continue;
        std::string term = post.tokens[c[i]].lemma;
        for (std::size_t n = 2; n <= 3 && i + n - 1 < c.size(); ++n) {
            const auto& next = post.tokens[c[i + n - 1]];
            if (!is_content_pos(next.pos)) break;
            term += ' ';
            term += next.lemma;
            out.push_back({term, n, i});
        }
    }
    return out;
}

std::set<std::string> extract_candidate_ngrams(const ProcessedPost& post) {
    std::set<std::string> out;
    for (auto& occ : candidate_ngram_occurrences(post)) out.insert(std::move(occ.term));
    return out;
}

std::vector<std::size_t> find_term(const ProcessedPost& post, const std::vector<std::string>& lemmas) {
    std::vector<std::size_t> out;
    const auto& c = post.content;
    if (lemmas.empty() || lemmas.size() > c.size()) return out;
    for (std::size_t i = 0; i + lemmas.size() <= c.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < lemmas.size() && match; ++k) match = post.tokens[c[i + k]].lemma == lemmas[k];
        if (match) out.push_back(i);
    }
    return out;
}

}  // namespace trendlex
