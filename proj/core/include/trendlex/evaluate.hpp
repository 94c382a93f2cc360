#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trendlex/corpus.hpp"
#include "trendlex/similarity.hpp"

namespace trendlex {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    std::vector<std::string> unlabeled;  // verdict terms missing from gold

    bool operator==(const MetricsReport&) const = default;
};

/// Rounds half away from zero to two decimals.
double round2(double value);

/// Positive class is antisemitic; F-score is F1. Ratios with an empty
/// denominator are 0.
MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion);

/// Terms absent from gold are listed in `unlabeled` and excluded. Throws
/// InvalidArgument when nothing is left to evaluate.
MetricsReport evaluate_run(std::span<const SimilarityVerdict> verdicts, const GoldStandard& gold);

/// "| name | approach | 0.80 | 0.63 | 0.83 | 0.72 |"
std::string table_row(std::string_view name, std::string_view approach, const MetricsReport& m);
std::string csv_header();
std::string csv_row(std::string_view name, std::string_view approach, const MetricsReport& m);

}  // namespace trendlex
