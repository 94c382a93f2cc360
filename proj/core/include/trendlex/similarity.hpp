#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trendlex/corpus.hpp"
#include "trendlex/embedding.hpp"

namespace trendlex {

/// Cosine similarity; 0 when either vector is all zeros. Throws
/// InvalidArgument on a size mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Mean cosine of each trending term against every seed at one window size.
std::map<std::string, double> score_terms(std::span<const TermEmbedding> terms,
                                          std::span<const TermEmbedding> seeds);

enum class ThresholdMode { median, mean };

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view s);

/// Median (mean of the two middle values for even counts).
double median(std::vector<double> values);

struct WindowClassification {
    double gamma = 0.0;
    std::map<std::string, int> labels;  // 1 iff score > gamma
};

WindowClassification classify_window(const std::map<std::string, double>& scores,
                                      ThresholdMode mode = ThresholdMode::median);

/// antisemitic iff at least m labels are 1. Throws InvalidArgument unless
/// 1 <= m <= labels.size().
Label vote(const std::map<std::size_t, int>& labels_per_window, std::size_t m);

struct WindowScore {
    std::size_t window = 0;
    double score = 0.0;
    int label = 0;
    double gamma = 0.0;

    bool operator==(const WindowScore&) const = default;
};

struct SimilarityVerdict {
    std::string term;
    std::vector<WindowScore> windows;  // ascending window size
    std::size_t vote_count = 0;
    Label final_label = Label::not_antisemitic;

    bool operator==(const SimilarityVerdict&) const = default;
};

/// Runs scoring, thresholding and voting over every window. Terms missing an
/// embedding at some window are skipped (reported by the caller).
std::vector<SimilarityVerdict> judge_terms(const EmbeddingTable& terms, const EmbeddingTable& seeds,
                                           const std::vector<std::size_t>& windows, std::size_t m,
                                           ThresholdMode mode = ThresholdMode::median);

}  // namespace trendlex
