#include "trendlex/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "trendlex/parallel.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

std::string_view to_string(Strategy strategy) {
    return strategy == Strategy::pretruncate ? "pretrunc" : "posttrunc";
}

TokenRange window_slice(TokenRange bounds, TokenSpan span, std::size_t w) {
    const std::size_t first = std::max(span.first, bounds.begin);
    const std::size_t last = std::min(span.last, bounds.end - 1);
    const std::size_t begin = first - std::min(w, first - bounds.begin);
    const std::size_t end = last + 1 + std::min(w, bounds.end - (last + 1));
    return {begin, end};
}

TokenRange window_slice(std::size_t token_count, TokenSpan span, std::size_t w) {
    return window_slice(TokenRange{0, token_count}, span, w);
}

std::vector<Occurrence> find_occurrences(std::span<const ProcessedPost> posts, const std::vector<std::string>& lemmas) {
    std::vector<Occurrence> out;
    for (std::size_t p = 0; p < posts.size(); ++p)
        for (auto start : find_term(posts[p], lemmas))
            out.push_back({p, {posts[p].content[start], posts[p].content[start + lemmas.size() - 1]}});
    return out;
}

std::vector<TokenRange> segment_post(std::size_t token_count, std::size_t max_tokens) {
    if (max_tokens == 0) throw InvalidArgument("max_tokens must be positive");
    std::vector<TokenRange> out;
    for (std::size_t b = 0; b < token_count; b += max_tokens) out.push_back({b, std::min(token_count, b + max_tokens)});
    return out;
}

Vector mean_vector(std::span<const Vector> vectors) {
    if (vectors.empty()) return {};
    const std::size_t dim = vectors.front().size();
    // Neumaier summation per component keeps the result stable under reordering.
    Vector sum(dim, 0.0), comp(dim, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw InvalidArgument("vectors disagree on dimension");
        for (std::size_t k = 0; k < dim; ++k) {
            const double x = v[k];
            const double t = sum[k] + x;
            comp[k] += std::abs(sum[k]) >= std::abs(x) ? (sum[k] - t) + x : (x - t) + sum[k];
            sum[k] = t;
        }
    }
    for (std::size_t k = 0; k < dim; ++k) sum[k] = (sum[k] + comp[k]) / static_cast<double>(vectors.size());
    return sum;
}

namespace {

std::string slice_text(const ProcessedPost& post, TokenRange r) {
    std::string s;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (i > r.begin) s += ' ';
        s += post.tokens[i].lemma;
    }
    return s;
}

std::vector<std::string> slice_words(const ProcessedPost& post, TokenRange r) {
    std::vector<std::string> words;
    for (std::size_t i = r.begin; i < r.end; ++i) words.push_back(post.tokens[i].lemma);
    return words;
}

void check_vector(const Vector& v, const EmbeddingProvider& provider, const char* what) {
    if (provider.dim() != 0 && v.size() != provider.dim())
        throw TransportError(std::string(what) + " has size " + std::to_string(v.size()) + ", provider dim is " +
                             std::to_string(provider.dim()));
    for (double x : v)
        if (!std::isfinite(x)) throw TransportError(std::string(what) + " is not finite");
}

// Final-layer word vectors of every segment of one post.
struct PostLookup {
    std::vector<TokenRange> segments;
    std::vector<Vector> words;  // indexed by token position
};

PostLookup embed_whole_post(const ProcessedPost& post, const EmbeddingProvider& provider) {
    PostLookup lookup;
    lookup.segments = segment_post(post.tokens.size(), provider.max_tokens());
    std::vector<std::string> texts;
    for (const auto& seg : lookup.segments) texts.push_back(slice_text(post, seg));
    auto results = provider.embed(texts);
    if (results.size() != texts.size()) throw TransportError("provider returned the wrong number of results");
    lookup.words.reserve(post.tokens.size());
    for (std::size_t s = 0; s < lookup.segments.size(); ++s) {
        auto words = slice_words(post, lookup.segments[s]);
        for (auto& v : align_to_words(results[s], words)) {
            check_vector(v, provider, "final-layer vector");
            lookup.words.push_back(std::move(v));
        }
    }
    return lookup;
}

Vector occurrence_vector(const PostLookup& lookup, TokenSpan span, std::size_t w) {
    // The occurrence belongs to the segment holding its first token.
    auto seg = std::find_if(lookup.segments.begin(), lookup.segments.end(),
                            [&](const TokenRange& r) { return span.first >= r.begin && span.first < r.end; });
    const auto slice = window_slice(*seg, span, w);
    return mean_vector(std::span<const Vector>(lookup.words).subspan(slice.begin, slice.length()));
}

std::vector<std::string> term_lemmas(const std::string& term) { return text::split_words(term); }

}  // namespace

TermEmbedding embed_pretruncate(const std::string& term, std::span<const ProcessedPost> posts, std::size_t w,
                                const EmbeddingProvider& provider) {
    const auto occurrences = find_occurrences(posts, term_lemmas(term));
    if (occurrences.empty()) throw NoContextError(term);
    std::vector<std::string> texts;
    for (const auto& occ : occurrences)
        texts.push_back(slice_text(posts[occ.post], window_slice(posts[occ.post].tokens.size(), occ.span, w)));
    auto results = provider.embed(texts);
    std::vector<Vector> pooled;
    for (auto& r : results) {
        check_vector(r.pooled, provider, "pooled vector");
        pooled.push_back(std::move(r.pooled));
    }
    return {term, w, mean_vector(pooled), occurrences.size()};
}

TermEmbedding embed_posttruncate(const std::string& term, std::span<const ProcessedPost> posts, std::size_t w,
                                 const EmbeddingProvider& provider) {
    const auto occurrences = find_occurrences(posts, term_lemmas(term));
    if (occurrences.empty()) throw NoContextError(term);
    std::map<std::size_t, PostLookup> lookups;
    std::vector<Vector> vectors;
    for (const auto& occ : occurrences) {
        auto it = lookups.find(occ.post);
        if (it == lookups.end()) it = lookups.emplace(occ.post, embed_whole_post(posts[occ.post], provider)).first;
        vectors.push_back(occurrence_vector(it->second, occ.span, w));
    }
    return {term, w, mean_vector(vectors), occurrences.size()};
}

EmbedBatchResult embed_terms(const std::vector<std::string>& terms, std::span<const ProcessedPost> posts,
                             const std::vector<std::size_t>& windows, Strategy strategy,
                             const EmbeddingProvider& provider, std::size_t threads) {
    std::vector<std::vector<Occurrence>> occurrences(terms.size());
    parallel_for(terms.size(), threads,
                 [&](std::size_t i) { occurrences[i] = find_occurrences(posts, term_lemmas(terms[i])); });

    EmbedBatchResult result;
    constexpr std::size_t kChunk = 64;

    if (strategy == Strategy::pretruncate) {
        // Deduplicate slice texts across terms, windows and occurrences.
        std::vector<std::string> texts;
        std::unordered_map<std::string, std::size_t> text_index;
        std::vector<std::vector<std::vector<std::size_t>>> slots(terms.size());
        for (std::size_t t = 0; t < terms.size(); ++t) {
            slots[t].resize(windows.size());
            for (std::size_t wi = 0; wi < windows.size(); ++wi)
                for (const auto& occ : occurrences[t]) {
                    const auto& post = posts[occ.post];
                    auto text = slice_text(post, window_slice(post.tokens.size(), occ.span, windows[wi]));
                    auto [it, inserted] = text_index.emplace(text, texts.size());
                    if (inserted) texts.push_back(std::move(text));
                    slots[t][wi].push_back(it->second);
                }
        }
        std::vector<Vector> pooled(texts.size());
        const std::size_t chunks = (texts.size() + kChunk - 1) / kChunk;
        parallel_for(chunks, threads, [&](std::size_t c) {
            const std::size_t b = c * kChunk, e = std::min(texts.size(), b + kChunk);
            auto res = provider.embed(std::span<const std::string>(texts).subspan(b, e - b));
            if (res.size() != e - b) throw TransportError("provider returned the wrong number of results");
            for (std::size_t i = b; i < e; ++i) {
                check_vector(res[i - b].pooled, provider, "pooled vector");
                pooled[i] = std::move(res[i - b].pooled);
            }
        });
        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (occurrences[t].empty()) {
                result.no_context.push_back(terms[t]);
                continue;
            }
            auto& row = result.table[terms[t]];
            for (std::size_t wi = 0; wi < windows.size(); ++wi) {
                std::vector<Vector> vs;
                for (auto idx : slots[t][wi]) vs.push_back(pooled[idx]);
                row[windows[wi]] = {terms[t], windows[wi], mean_vector(vs), vs.size()};
            }
        }
        return result;
    }

    std::vector<std::size_t> needed;
    for (const auto& occs : occurrences)
        for (const auto& o : occs) needed.push_back(o.post);
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    std::vector<PostLookup> lookups(needed.size());
    parallel_for(needed.size(), threads, [&](std::size_t i) { lookups[i] = embed_whole_post(posts[needed[i]], provider); });
    auto lookup_of = [&](std::size_t post) -> const PostLookup& {
        return lookups[static_cast<std::size_t>(std::lower_bound(needed.begin(), needed.end(), post) - needed.begin())];
    };

    std::vector<std::map<std::size_t, TermEmbedding>> rows(terms.size());
    parallel_for(terms.size(), threads, [&](std::size_t t) {
        if (occurrences[t].empty()) return;
        for (auto w : windows) {
            std::vector<Vector> vs;
            for (const auto& occ : occurrences[t]) vs.push_back(occurrence_vector(lookup_of(occ.post), occ.span, w));
            rows[t][w] = {terms[t], w, mean_vector(vs), vs.size()};
        }
    });
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (occurrences[t].empty()) result.no_context.push_back(terms[t]);
        else result.table[terms[t]] = std::move(rows[t]);
    }
    return result;
}

}  // namespace trendlex
