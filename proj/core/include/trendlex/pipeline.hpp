#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trendlex/corpus.hpp"
#include "trendlex/embedding.hpp"
#include "trendlex/evaluate.hpp"
#include "trendlex/removal.hpp"
#include "trendlex/similarity.hpp"
#include "trendlex/trending.hpp"
#include "trendlex/verdicts.hpp"

namespace trendlex {

enum class Variant { colloc_pretrunc, colloc_posttrunc, tfidf_pretrunc, tfidf_posttrunc };

std::string_view to_string(Variant v);
/// Throws InvalidArgument on an unknown name.
Variant parse_variant(std::string_view s);
Origin extractor_of(Variant v);
Strategy strategy_of(Variant v);
/// "standard", "hybrid" or "advanced".
std::string_view approach_of(Variant v);

struct RunConfig {
    Variant variant = Variant::tfidf_posttrunc;
    std::size_t top_k = 200;
    std::vector<std::size_t> windows;  // empty: variant default
    std::size_t vote_m = 0;            // 0: variant default
    std::string embedder = "stub:42";
    std::string posts_path;
    std::string seeds_path;
    std::string gold_path;         // optional
    std::string known_terms_path;  // empty: known_terms.txt next to seeds
    std::string markers_path;      // empty: bundled markers.txt
    std::string data_dir;          // empty: bundled language data
    std::string out_dir;           // empty: nothing persisted
    std::size_t min_posts = 5;
    std::size_t colloc_width = 10;
    std::size_t colloc_min_frequency = 2;
    ThresholdMode threshold = ThresholdMode::median;
    std::size_t threads = 1;

    /// Fills variant defaults (pre: windows 5..14, m=7; post: 1..10, m=9)
    /// and derived paths; validates ranges. Throws InvalidArgument.
    void resolve();

    bool operator==(const RunConfig&) const = default;
};

std::vector<std::size_t> default_windows(Strategy s);
std::size_t default_vote_m(Strategy s);

struct CandidateRecord {
    CandidateTerm candidate;
    std::optional<SimilarityVerdict> verdict;

    bool operator==(const CandidateRecord&) const = default;
};

struct RunReport {
    std::string run_id;
    std::string created_at;
    RunConfig config;
    std::vector<std::string> analysis_seeds;  // after support filtering
    std::vector<TermStats> trending;          // extractor output before removal
    std::vector<RemovedTerm> removed;
    std::vector<std::string> no_context;      // terms or seeds without occurrences
    std::vector<CandidateRecord> candidates;  // removal survivors, ordered
    std::map<std::size_t, double> gamma_per_window;
    std::map<std::string, Post> source_posts;  // every post a candidate cites
    std::optional<MetricsReport> metrics;
    std::vector<std::string> warnings;
    std::vector<HumanVerdict> human_verdicts;

    const CandidateRecord* find(std::string_view term) const;
    std::vector<SimilarityVerdict> verdicts() const;

    bool operator==(const RunReport&) const = default;
};

struct RunResult {
    RunReport report;
    std::string run_dir;  // empty when out_dir was empty
};

/// load -> preprocess -> trending -> removal -> embedding -> similarity ->
/// optional evaluation. Stage failures raise StageError; when out_dir is set
/// the run directory only appears once every file has been written.
RunResult run_pipeline(RunConfig config);

/// Same, with an already constructed provider (config.embedder is recorded
/// in the report but not used to build one).
RunResult run_pipeline(RunConfig config, std::shared_ptr<const EmbeddingProvider> provider);

std::string render_report(const RunReport& report);
RunReport parse_report(std::string_view json);
RunReport load_report(const std::string& path);

/// Candidate section alone, for determinism checks.
std::string render_candidates(const RunReport& report);
/// terms.json: [{term, frequency, max_tfidf}]
std::string render_terms(const RunReport& report);
std::string render_config(const RunConfig& config);

/// Writes config.json, terms.json, report.json under out_dir/run_id.
std::string persist_run(const RunReport& report, const std::string& out_dir);

/// Rewrites report.json with the current verdicts.jsonl content.
void sync_human_verdicts(const std::string& run_dir);

struct PromotionResult {
    std::vector<std::string> promoted;  // newly written to the lexicons
    std::vector<std::string> already_known;
};

/// Appends accepted terms to seeds.txt ("promoted:<run_id>") and to
/// known_terms.txt. Every term needs an active antisemitic human verdict;
/// otherwise InvalidArgument and nothing is written.
PromotionResult promote_terms(const RunReport& report,
                              const std::map<std::string, HumanVerdict>& active_verdicts,
                              const std::vector<std::string>& accepted);

/// All terms whose active verdict is antisemitic.
std::vector<std::string> antisemitic_verdict_terms(
    const std::map<std::string, HumanVerdict>& active_verdicts);

/// Loads known_terms.txt (missing file = empty) plus every seed's lemma form.
KnownTerms load_known_terms(const SeedLexicon& seeds, const std::string& known_terms_path,
                            const LanguageResources& res);

std::string utc_timestamp();
std::string new_run_id();

}  // namespace trendlex
