#include "trendlex/evaluate.hpp"

#include <cmath>
#include <cstdio>

#include "trendlex/error.hpp"

namespace trendlex {

double round2(double value) { return std::round(value * 100.0) / 100.0; }

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round2(v));
    return buf;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& c) {
    MetricsReport m;
    m.confusion = c;
    m.accuracy = ratio(c.tp + c.tn, c.total());
    m.precision = ratio(c.tp, c.tp + c.fp);
    m.recall = ratio(c.tp, c.tp + c.fn);
    m.f_score = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

MetricsReport evaluate_run(std::span<const SimilarityVerdict> verdicts, const GoldStandard& gold) {
    ConfusionMatrix c;
    std::vector<std::string> unlabeled;
    for (const auto& v : verdicts) {
        auto truth = gold.label_of(v.term);
        if (!truth) {
            unlabeled.push_back(v.term);
            continue;
        }
        const bool predicted = v.final_label == Label::antisemitic;
        const bool actual = *truth == Label::antisemitic;
        if (predicted && actual) ++c.tp;
        else if (predicted) ++c.fp;
        else if (actual) ++c.fn;
        else ++c.tn;
    }
    if (c.total() == 0) throw InvalidArgument("no verdict term is labeled in the gold standard");
    auto m = metrics_from_confusion(c);
    m.unlabeled = std::move(unlabeled);
    return m;
}

std::string table_row(std::string_view name, std::string_view approach, const MetricsReport& m) {
    return "| " + std::string(name) + " | " + std::string(approach) + " | " + fixed2(m.accuracy) + " | " +
           fixed2(m.precision) + " | " + fixed2(m.recall) + " | " + fixed2(m.f_score) + " |";
}

std::string csv_header() { return "model_embedding,approach_type,accuracy,precision,recall,f_score"; }

std::string csv_row(std::string_view name, std::string_view approach, const MetricsReport& m) {
    return std::string(name) + "," + std::string(approach) + "," + fixed2(m.accuracy) + "," + fixed2(m.precision) +
           "," + fixed2(m.recall) + "," + fixed2(m.f_score);
}

}  // namespace trendlex
