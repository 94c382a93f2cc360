#include "trendlex/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trendlex/error.hpp"

namespace trendlex {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    const auto c = static_cast<double>(dot / (std::sqrt(na) * std::sqrt(nb)));
    return std::clamp(c, -1.0, 1.0);
}

std::map<std::string, double> score_terms(std::span<const TermEmbedding> terms, std::span<const TermEmbedding> seeds) {
    if (seeds.empty()) throw InvalidArgument("no seed embeddings");
    const auto window = seeds.front().window;
    for (const auto& s : seeds)
        if (s.window != window) throw InvalidArgument("seed embeddings mix window sizes");
    std::map<std::string, double> scores;
    for (const auto& t : terms) {
        if (t.window != window) throw InvalidArgument("term " + t.term + " has a different window size");
        long double sum = 0;
        for (const auto& s : seeds) sum += cosine(t.vector, s.vector);
        scores[t.term] = static_cast<double>(sum / static_cast<long double>(seeds.size()));
    }
    return scores;
}

std::string_view to_string(ThresholdMode mode) { return mode == ThresholdMode::median ? "median" : "mean"; }

ThresholdMode parse_threshold_mode(std::string_view s) {
    if (s == "median") return ThresholdMode::median;
    if (s == "mean") return ThresholdMode::mean;
    throw InvalidArgument("unknown threshold mode \"" + std::string(s) + "\"");
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty set");
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

WindowClassification classify_window(const std::map<std::string, double>& scores, ThresholdMode mode) {
    if (scores.empty()) throw InvalidArgument("no scores to classify");
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& [_, s] : scores) values.push_back(s);
    WindowClassification out;
    if (mode == ThresholdMode::median) {
        out.gamma = median(values);
    } else {
        long double sum = 0;
        for (double v : values) sum += v;
        out.gamma = static_cast<double>(sum / static_cast<long double>(values.size()));
    }
    for (const auto& [term, s] : scores) out.labels[term] = s > out.gamma ? 1 : 0;
    return out;
}

Label vote(const std::map<std::size_t, int>& labels, std::size_t m) {
    if (m < 1 || m > labels.size())
        throw InvalidArgument("vote threshold m=" + std::to_string(m) + " outside 1.." + std::to_string(labels.size()));
    std::size_t ones = 0;
    for (const auto& [_, l] : labels) ones += l == 1;
    return ones >= m ? Label::antisemitic : Label::not_antisemitic;
}

std::vector<SimilarityVerdict> judge_terms(const EmbeddingTable& terms, const EmbeddingTable& seeds,
                                           const std::vector<std::size_t>& windows, std::size_t m,
                                           ThresholdMode mode) {
    std::vector<std::string> usable;
    for (const auto& [term, row] : terms) {
        bool complete = true;
        for (auto w : windows) complete = complete && row.contains(w);
        if (complete) usable.push_back(term);
    }
    std::map<std::string, SimilarityVerdict> verdicts;
    for (const auto& term : usable) verdicts[term].term = term;
    if (usable.empty()) return {};

    for (auto w : windows) {
        std::vector<TermEmbedding> seed_embs;
        for (const auto& [_, row] : seeds)
            if (auto it = row.find(w); it != row.end()) seed_embs.push_back(it->second);
        std::vector<TermEmbedding> term_embs;
        for (const auto& term : usable) term_embs.push_back(terms.at(term).at(w));
        const auto scores = score_terms(term_embs, seed_embs);
        const auto cls = classify_window(scores, mode);
        for (const auto& term : usable)
            verdicts[term].windows.push_back({w, scores.at(term), cls.labels.at(term), cls.gamma});
    }

    std::vector<SimilarityVerdict> out;
    for (auto& [term, v] : verdicts) {
        std::sort(v.windows.begin(), v.windows.end(), [](auto& a, auto& b) { return a.window < b.window; });
        std::map<std::size_t, int> labels;
        for (const auto& ws : v.windows) labels[ws.window] = ws.label;
        v.vote_count = 0;
        for (const auto& [_, l] : labels) v.vote_count += l;
        v.final_label = vote(labels, m);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace trendlex
