#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trendlex/trending.hpp"

namespace trendlex {

/// Words that mark a term as overtly (not coded) about Jewish topics.
class MarkerLexicon {
public:
    /// jew, jewish, kike, zionist
    static MarkerLexicon defaults();
    static MarkerLexicon load(const std::string& path);

    /// Throws InvalidArgument on an empty list or a multi-word entry.
    explicit MarkerLexicon(std::vector<std::string> words);

    const std::vector<std::string>& words() const noexcept { return words_; }

    /// True if any marker is a substring of any word of `term`.
    bool marks(std::string_view term) const;

private:
    std::vector<std::string> words_;
};

/// Lemma forms of every previously known expression (seeds plus promoted terms).
using KnownTerms = std::set<std::string, std::less<>>;

/// True if `bigram` is a contiguous span of any trigram in `reference`.
bool embedded_in_trigram(std::string_view bigram, const std::vector<CandidateTerm>& reference);

std::vector<CandidateTerm> drop_embedded_bigrams(const std::vector<CandidateTerm>& terms);
std::vector<CandidateTerm> drop_known(const std::vector<CandidateTerm>& terms, const KnownTerms& known);
std::vector<CandidateTerm> drop_overt(const std::vector<CandidateTerm>& terms, const MarkerLexicon& markers);

enum class RemovalReason { embedded_bigram, known, overt };

std::string_view to_string(RemovalReason reason);

struct RemovedTerm {
    std::string term;
    RemovalReason reason;

    bool operator==(const RemovedTerm&) const = default;
};

struct RemovalResult {
    std::vector<CandidateTerm> kept;   // ordered by frequency desc, term asc
    std::vector<RemovedTerm> removed;  // first matching reason, in input order
};

/// Applies redundant, known and overt removal. Each predicate is evaluated
/// against the unfiltered input, so the stage order does not change the result.
RemovalResult apply_removal(const std::vector<CandidateTerm>& terms, const KnownTerms& known,
                            const MarkerLexicon& markers);

/// Applies the three filters one after another in the given order, each
/// filter seeing the original input as its reference list.
std::vector<CandidateTerm> apply_removal_in_order(const std::vector<CandidateTerm>& terms,
                                                  const KnownTerms& known,
                                                  const MarkerLexicon& markers,
                                                  const std::vector<RemovalReason>& order);

}  // namespace trendlex
