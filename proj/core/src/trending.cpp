#include "trendlex/trending.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "trendlex/error.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

std::string_view to_string(Origin origin) { return origin == Origin::tfidf ? "tfidf" : "colloc"; }

Origin parse_origin(std::string_view s) {
    if (s == "tfidf") return Origin::tfidf;
    if (s == "colloc") return Origin::colloc;
    throw InvalidArgument("unknown origin \"" + std::string(s) + "\"");
}

std::vector<Document> documents_from_posts(std::span<const ProcessedPost> posts) {
    std::vector<Document> docs;
    docs.reserve(posts.size());
    for (const auto& p : posts) {
        Document d{p.post_id, {}};
        for (auto& occ : candidate_ngram_occurrences(p)) ++d.counts[std::move(occ.term)];
        docs.push_back(std::move(d));
    }
    return docs;
}

double smoothed_idf(std::size_t docs, std::size_t df) {
    return std::log((1.0 + static_cast<double>(docs)) / (1.0 + static_cast<double>(df))) + 1.0;
}

double TfidfMatrix::at(std::size_t r, std::size_t column) const {
    const auto& cells = rows_.at(r);
    auto it = std::lower_bound(cells.begin(), cells.end(), column,
                               [](const Cell& c, std::size_t col) { return c.column < col; });
    return it != cells.end() && it->column == column ? it->weight : 0.0;
}

std::size_t TfidfMatrix::column_of(std::string_view term) const {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), term);
    return it != vocabulary_.end() && *it == term ? static_cast<std::size_t>(it - vocabulary_.begin())
                                                  : vocabulary_.size();
}

TfidfMatrix build_tfidf(std::span<const Document> docs) {
    TfidfMatrix m;
    std::vector<std::string> vocab;
    for (const auto& d : docs)
        for (const auto& [term, count] : d.counts)
            if (count > 0) vocab.push_back(term);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    if (vocab.empty()) throw InvalidArgument("no candidate terms");

    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);

    m.doc_freq_.assign(vocab.size(), 0);
    for (const auto& d : docs)
        for (const auto& [term, count] : d.counts)
            if (count > 0) ++m.doc_freq_[index.at(term)];

    std::vector<double> idf(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) idf[i] = smoothed_idf(docs.size(), m.doc_freq_[i]);

    m.rows_.reserve(docs.size());
    m.row_ids_.reserve(docs.size());
    for (const auto& d : docs) {
        std::vector<TfidfMatrix::Cell> cells;
        cells.reserve(d.counts.size());
        // d.counts is an ordered map, so columns come out ascending.
        for (const auto& [term, count] : d.counts) {
            if (count == 0) continue;
            const auto col = index.at(term);
            cells.push_back({col, static_cast<double>(count) * idf[col]});
        }
        m.rows_.push_back(std::move(cells));
        m.row_ids_.push_back(d.id);
    }
    m.vocabulary_ = std::move(vocab);
    return m;
}

std::vector<std::size_t> corpus_frequencies(const TfidfMatrix& matrix, std::span<const Document> docs) {
    std::vector<std::size_t> f(matrix.columns(), 0);
    for (const auto& d : docs)
        for (const auto& [term, count] : d.counts) {
            auto col = matrix.column_of(term);
            if (col < f.size()) f[col] += count;
        }
    return f;
}

namespace {

std::vector<double> column_maxima(const TfidfMatrix& m) {
    std::vector<double> best(m.columns(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (const auto& cell : m.row(r)) best[cell.column] = std::max(best[cell.column], cell.weight);
    return best;
}

std::size_t word_count(std::string_view term) {
    return static_cast<std::size_t>(std::count(term.begin(), term.end(), ' ')) + 1;
}

}  // namespace

std::vector<TermStats> term_stats(const TfidfMatrix& matrix, std::span<const std::size_t> frequencies) {
    if (frequencies.size() != matrix.columns())
        throw InvalidArgument("frequency vector does not match the vocabulary");
    const auto best = column_maxima(matrix);
    std::vector<TermStats> out;
    out.reserve(matrix.columns());
    for (std::size_t c = 0; c < matrix.columns(); ++c)
        out.push_back({matrix.vocabulary()[c], frequencies[c], best[c], matrix.doc_freq()[c]});
    return out;
}

void sort_by_frequency(std::vector<CandidateTerm>& terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const CandidateTerm& a, const CandidateTerm& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.term < b.term;
    });
}

std::vector<CandidateTerm> select_trending(const TfidfMatrix& matrix,
                                           std::span<const std::size_t> frequencies, std::size_t k,
                                           TrendingDiagnostics* diagnostics) {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (frequencies.size() != matrix.columns())
        throw InvalidArgument("frequency vector does not match the vocabulary");
    const auto best = column_maxima(matrix);

    long double sum = 0.0L;
    for (double s : best) sum += s;
    const double delta = best.empty() ? 0.0 : static_cast<double>(sum / static_cast<long double>(best.size()));
    const double floor = delta - kThresholdTieTolerance * std::abs(delta);

    std::vector<std::size_t> survivors;
    for (std::size_t c = 0; c < best.size(); ++c)
        if (best[c] >= floor) survivors.push_back(c);

    std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
        if (frequencies[a] != frequencies[b]) return frequencies[a] > frequencies[b];
        return matrix.vocabulary()[a] < matrix.vocabulary()[b];
    });
    if (diagnostics) *diagnostics = {delta, survivors.size()};
    survivors.resize(std::min(k, survivors.size()));

    std::vector<std::vector<std::string>> sources(matrix.columns());
    std::vector<char> wanted(matrix.columns(), 0);
    for (auto c : survivors) wanted[c] = 1;
    for (std::size_t r = 0; r < matrix.rows(); ++r)
        for (const auto& cell : matrix.row(r))
            if (wanted[cell.column]) sources[cell.column].push_back(matrix.row_ids()[r]);

    std::vector<CandidateTerm> out;
    out.reserve(survivors.size());
    for (auto c : survivors) {
        const auto& term = matrix.vocabulary()[c];
        out.push_back({term, word_count(term), frequencies[c], best[c], matrix.doc_freq()[c],
                       std::move(sources[c]), Origin::tfidf});
    }
    return out;
}

std::vector<CandidateTerm> colloc_trending(std::span<const ProcessedPost> posts,
                                           const std::vector<std::vector<std::string>>& seeds,
                                           const CollocOptions& options) {
    struct Tally {
        std::size_t count = 0;
        std::vector<std::string> posts;
    };
    std::map<std::string, Tally> tallies;

    for (const auto& post : posts) {
        for (const auto& seed : seeds) {
            for (auto start : find_term(post, seed)) {
                // One concordance line: seed plus context_width content words per side.
                const std::size_t begin = start >= options.context_width ? start - options.context_width : 0;
                const std::size_t end = std::min(post.content.size(), start + seed.size() + options.context_width);
                for (std::size_t i = begin; i < end; ++i) {
                    if (!is_content_pos(post.content_token(i).pos)) continue;
                    std::string term = post.content_token(i).lemma;
                    for (std::size_t n = 2; n <= 3 && i + n - 1 < end; ++n) {
                        const auto& next = post.content_token(i + n - 1);
                        if (!is_content_pos(next.pos)) break;
                        term += ' ';
                        term += next.lemma;
                        auto& t = tallies[term];
                        ++t.count;
                        if (std::find(t.posts.begin(), t.posts.end(), post.post_id) == t.posts.end())
                            t.posts.push_back(post.post_id);
                    }
                }
            }
        }
    }

    std::vector<CandidateTerm> out;
    for (auto& [term, tally] : tallies) {
        if (tally.count < options.min_frequency) continue;
        CandidateTerm c;
        c.term = term;
        c.n = word_count(term);
        c.frequency = tally.count;
        c.doc_count = tally.posts.size();
        c.source_post_ids = std::move(tally.posts);
        c.origin = Origin::colloc;
        out.push_back(std::move(c));
    }
    sort_by_frequency(out);
    return out;
}

}  // namespace trendlex
