#include "trendlex/removal.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "trendlex/error.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

MarkerLexicon MarkerLexicon::defaults() { return MarkerLexicon({"jew", "jewish", "kike", "zionist"}); }

MarkerLexicon MarkerLexicon::load(const std::string& path) { return MarkerLexicon(text::read_list_file(path)); }

MarkerLexicon::MarkerLexicon(std::vector<std::string> words) {
    for (auto& w : words) {
        auto t = text::lower(text::trim(w));
        if (t.empty()) continue;
        if (t.find(' ') != std::string::npos) throw InvalidArgument("marker must be a single word: " + t);
        words_.push_back(std::move(t));
    }
    if (words_.empty()) throw InvalidArgument("marker lexicon is empty");
}

bool MarkerLexicon::marks(std::string_view term) const {
    for (const auto& word : text::split_words(text::lower(term)))
        for (const auto& m : words_)
            if (word.find(m) != std::string::npos) return true;
    return false;
}

std::string_view to_string(RemovalReason reason) {
    switch (reason) {
        case RemovalReason::embedded_bigram: return "embedded_bigram";
        case RemovalReason::known: return "known";
        case RemovalReason::overt: return "overt";
    }
    return "unknown";
}

namespace {

std::unordered_set<std::string> trigram_spans(const std::vector<CandidateTerm>& reference) {
    std::unordered_set<std::string> spans;
    for (const auto& c : reference) {
        auto words = text::split_words(c.term);
        if (words.size() != 3) continue;
        spans.insert(words[0] + " " + words[1]);
        spans.insert(words[1] + " " + words[2]);
    }
    return spans;
}

bool is_bigram(std::string_view term) { return text::split_words(term).size() == 2; }

using Predicate = std::function<bool(const CandidateTerm&)>;

Predicate predicate_for(RemovalReason reason, const KnownTerms& known, const MarkerLexicon& markers,
                        const std::unordered_set<std::string>& spans) {
    switch (reason) {
        case RemovalReason::embedded_bigram:
            return [&spans](const CandidateTerm& c) { return is_bigram(c.term) && spans.contains(c.term); };
        case RemovalReason::known:
            return [&known](const CandidateTerm& c) { return known.contains(c.term); };
        case RemovalReason::overt:
            return [&markers](const CandidateTerm& c) { return markers.marks(c.term); };
    }
    return [](const CandidateTerm&) { return false; };
}

std::vector<CandidateTerm> keep_if_not(const std::vector<CandidateTerm>& terms, const Predicate& drop) {
    std::vector<CandidateTerm> out;
    for (const auto& c : terms)
        if (!drop(c)) out.push_back(c);
    return out;
}

}  // namespace

bool embedded_in_trigram(std::string_view bigram, const std::vector<CandidateTerm>& reference) {
    return is_bigram(bigram) && trigram_spans(reference).contains(std::string(bigram));
}

std::vector<CandidateTerm> drop_embedded_bigrams(const std::vector<CandidateTerm>& terms) {
    const auto spans = trigram_spans(terms);
    return keep_if_not(terms, [&](const CandidateTerm& c) { return is_bigram(c.term) && spans.contains(c.term); });
}

std::vector<CandidateTerm> drop_known(const std::vector<CandidateTerm>& terms, const KnownTerms& known) {
    return keep_if_not(terms, [&](const CandidateTerm& c) { return known.contains(c.term); });
}

std::vector<CandidateTerm> drop_overt(const std::vector<CandidateTerm>& terms, const MarkerLexicon& markers) {
    return keep_if_not(terms, [&](const CandidateTerm& c) { return markers.marks(c.term); });
}

RemovalResult apply_removal(const std::vector<CandidateTerm>& terms, const KnownTerms& known,
                            const MarkerLexicon& markers) {
    const auto spans = trigram_spans(terms);
    const RemovalReason order[] = {RemovalReason::embedded_bigram, RemovalReason::known, RemovalReason::overt};
    RemovalResult result;
    for (const auto& c : terms) {
        bool dropped = false;
        for (auto reason : order) {
            if (predicate_for(reason, known, markers, spans)(c)) {
                result.removed.push_back({c.term, reason});
                dropped = true;
                break;
            }
        }
        if (!dropped) result.kept.push_back(c);
    }
    sort_by_frequency(result.kept);
    return result;
}

std::vector<CandidateTerm> apply_removal_in_order(const std::vector<CandidateTerm>& terms,
                                                  const KnownTerms& known, const MarkerLexicon& markers,
                                                  const std::vector<RemovalReason>& order) {
    const auto spans = trigram_spans(terms);
    auto current = terms;
    for (auto reason : order) current = keep_if_not(current, predicate_for(reason, known, markers, spans));
    sort_by_frequency(current);
    return current;
}

}  // namespace trendlex
