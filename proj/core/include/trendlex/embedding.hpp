#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trendlex/error.hpp"
#include "trendlex/preprocess.hpp"
#include "trendlex/provider.hpp"

namespace trendlex {

struct TermEmbedding {
    std::string term;
    std::size_t window = 0;
    Vector vector;
    std::size_t occurrences = 0;
};

/// Raised when a term has no occurrence in the posts it is embedded from.
class NoContextError : public Error {
public:
    explicit NoContextError(const std::string& term)
        : Error("term has no context: " + term), term_(term) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

/// Inclusive token positions of a term occurrence in ProcessedPost::tokens.
struct TokenSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t length() const noexcept { return last - first + 1; }
    bool operator==(const TokenSpan&) const = default;
};

/// Half-open token range.
struct TokenRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - begin; }
    bool operator==(const TokenRange&) const = default;
};

/// Up to w tokens on each side of the span, clipped to [bounds.begin, bounds.end).
TokenRange window_slice(TokenRange bounds, TokenSpan span, std::size_t w);

/// Clipped to [0, token_count).
TokenRange window_slice(std::size_t token_count, TokenSpan span, std::size_t w);

struct Occurrence {
    std::size_t post = 0;  // index into the post list
    TokenSpan span;
};

/// Every match of the lemma sequence against each post's content lemmas,
/// mapped back to token positions. Repeats inside one post are kept.
std::vector<Occurrence> find_occurrences(std::span<const ProcessedPost> posts,
                                         const std::vector<std::string>& lemmas);

/// Consecutive non-overlapping segments of at most `max_tokens` tokens.
std::vector<TokenRange> segment_post(std::size_t token_count, std::size_t max_tokens);

enum class Strategy { pretruncate, posttruncate };

std::string_view to_string(Strategy strategy);

/// Element-wise mean with compensated summation; all vectors share one size.
Vector mean_vector(std::span<const Vector> vectors);

/// Embeds the window slice of each occurrence as its own text and averages
/// the pooled vectors. Throws NoContextError when `lemmas` never occurs.
TermEmbedding embed_pretruncate(const std::string& term, std::span<const ProcessedPost> posts,
                                std::size_t w, const EmbeddingProvider& provider);

/// Embeds each whole post once (split at max_tokens), then averages the
/// final-layer word vectors of each occurrence's window slice.
TermEmbedding embed_posttruncate(const std::string& term, std::span<const ProcessedPost> posts,
                                 std::size_t w, const EmbeddingProvider& provider);

/// Term -> window -> embedding, for a batch of terms over one window set.
using EmbeddingTable = std::map<std::string, std::map<std::size_t, TermEmbedding>>;

struct EmbedBatchResult {
    EmbeddingTable table;
    std::vector<std::string> no_context;  // terms dropped for lack of occurrences
};

/// Batched form used by the pipeline. Identical texts are embedded once;
/// output is independent of `threads`.
EmbedBatchResult embed_terms(const std::vector<std::string>& terms,
                             std::span<const ProcessedPost> posts,
                             const std::vector<std::size_t>& windows, Strategy strategy,
                             const EmbeddingProvider& provider, std::size_t threads = 1);

}  // namespace trendlex
