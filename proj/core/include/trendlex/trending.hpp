#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trendlex/preprocess.hpp"

namespace trendlex {

enum class Origin { tfidf, colloc };

std::string_view to_string(Origin origin);
Origin parse_origin(std::string_view s);

struct TermStats {
    std::string term;
    std::size_t frequency = 0;  // total occurrences in the corpus
    double max_tfidf = 0.0;     // highest weight over documents
    std::size_t doc_count = 0;

    bool operator==(const TermStats&) const = default;
};

struct CandidateTerm {
    std::string term;
    std::size_t n = 0;
    std::size_t frequency = 0;
    double max_tfidf = 0.0;
    std::size_t doc_count = 0;
    std::vector<std::string> source_post_ids;
    Origin origin = Origin::tfidf;

    bool operator==(const CandidateTerm&) const = default;
};

/// Candidate n-gram counts of one document (post).
struct Document {
    std::string id;
    std::map<std::string, std::size_t> counts;
};

std::vector<Document> documents_from_posts(std::span<const ProcessedPost> posts);

/// ln((1 + docs) / (1 + df)) + 1.
double smoothed_idf(std::size_t docs, std::size_t df);

/// Sparse document x term weight matrix; the vocabulary is sorted ascending.
class TfidfMatrix {
public:
    struct Cell {
        std::size_t column;
        double weight;
    };

    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t columns() const noexcept { return vocabulary_.size(); }

    const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    std::span<const Cell> row(std::size_t r) const { return rows_[r]; }
    const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }

    /// Weight of (row, column); 0 when the term is absent from the document.
    double at(std::size_t row, std::size_t column) const;

    /// Column index of `term`, or columns() when absent.
    std::size_t column_of(std::string_view term) const;

private:
    friend TfidfMatrix build_tfidf(std::span<const Document> docs);

    std::vector<std::string> vocabulary_;
    std::vector<std::string> row_ids_;
    std::vector<std::vector<Cell>> rows_;  // cells sorted by column
    std::vector<std::size_t> doc_freq_;
};

/// tf = raw count, idf = smoothed_idf, no length normalization.
/// Throws InvalidArgument("no candidate terms") on an empty vocabulary.
TfidfMatrix build_tfidf(std::span<const Document> docs);

/// Corpus frequency of every vocabulary term, aligned with matrix columns.
std::vector<std::size_t> corpus_frequencies(const TfidfMatrix& matrix,
                                            std::span<const Document> docs);

std::vector<TermStats> term_stats(const TfidfMatrix& matrix,
                                  std::span<const std::size_t> frequencies);

/// Relative slack under which a score counts as equal to the threshold.
inline constexpr double kThresholdTieTolerance = 1e-12;

struct TrendingDiagnostics {
    double delta = 0.0;
    std::size_t survivors = 0;
};

/// Keeps terms whose highest weight reaches the mean of all highest weights,
/// orders them by frequency (desc, ties by term asc) and returns the first k.
std::vector<CandidateTerm> select_trending(const TfidfMatrix& matrix,
                                           std::span<const std::size_t> frequencies,
                                           std::size_t k,
                                           TrendingDiagnostics* diagnostics = nullptr);

struct CollocOptions {
    std::size_t context_width = 10;  // content words on each side of a seed
    std::size_t min_frequency = 2;
};

/// Concordance around each seed occurrence, then n-gram frequency counting
/// inside the collected context lines. Seeds are lemma sequences.
std::vector<CandidateTerm> colloc_trending(std::span<const ProcessedPost> posts,
                                           const std::vector<std::vector<std::string>>& seeds,
                                           const CollocOptions& options = {});

/// Orders by frequency desc, then term asc.
void sort_by_frequency(std::vector<CandidateTerm>& terms);

}  // namespace trendlex
