#include "trendlex/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "trendlex/parallel.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

namespace fs = std::filesystem;

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::colloc_pretrunc: return "colloc-pretrunc";
        case Variant::colloc_posttrunc: return "colloc-posttrunc";
        case Variant::tfidf_pretrunc: return "tfidf-pretrunc";
        case Variant::tfidf_posttrunc: return "tfidf-posttrunc";
    }
    return "tfidf-posttrunc";
}

Variant parse_variant(std::string_view s) {
    for (auto v : {Variant::colloc_pretrunc, Variant::colloc_posttrunc, Variant::tfidf_pretrunc,
                   Variant::tfidf_posttrunc})
        if (to_string(v) == s) return v;
    throw InvalidArgument("unknown variant \"" + std::string(s) + "\"");
}

Origin extractor_of(Variant v) {
    return v == Variant::colloc_pretrunc || v == Variant::colloc_posttrunc ? Origin::colloc : Origin::tfidf;
}

Strategy strategy_of(Variant v) {
    return v == Variant::colloc_pretrunc || v == Variant::tfidf_pretrunc ? Strategy::pretruncate
                                                                         : Strategy::posttruncate;
}

std::string_view approach_of(Variant v) {
    switch (v) {
        case Variant::colloc_pretrunc: return "standard";
        case Variant::tfidf_posttrunc: return "advanced";
        default: return "hybrid";
    }
}

std::vector<std::size_t> default_windows(Strategy s) {
    std::vector<std::size_t> w;
    const std::size_t first = s == Strategy::pretruncate ? 5 : 1;
    for (std::size_t i = 0; i < 10; ++i) w.push_back(first + i);
    return w;
}

std::size_t default_vote_m(Strategy s) { return s == Strategy::pretruncate ? 7 : 9; }

void RunConfig::resolve() {
    const auto strategy = strategy_of(variant);
    if (windows.empty()) windows = default_windows(strategy);
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    if (vote_m == 0) vote_m = default_vote_m(strategy);
    if (vote_m > windows.size())
        throw InvalidArgument("vote_m=" + std::to_string(vote_m) + " exceeds the " + std::to_string(windows.size()) +
                              " configured windows");
    if (top_k < 1) throw InvalidArgument("top_k must be >= 1");
    if (min_posts < 1) throw InvalidArgument("min_posts must be >= 1");
    if (colloc_min_frequency < 1) throw InvalidArgument("colloc_min_frequency must be >= 1");
    if (threads < 1) threads = 1;
    if (posts_path.empty()) throw InvalidArgument("posts path is required");
    if (seeds_path.empty()) throw InvalidArgument("seeds path is required");
    if (data_dir.empty()) data_dir = default_data_dir();
    if (markers_path.empty()) markers_path = data_dir + "/markers.txt";
    if (known_terms_path.empty()) {
        const auto parent = fs::path(seeds_path).parent_path();
        known_terms_path = (parent.empty() ? fs::path("known_terms.txt") : parent / "known_terms.txt").string();
    }
}

const CandidateRecord* RunReport::find(std::string_view term) const {
    for (const auto& c : candidates)
        if (c.candidate.term == term) return &c;
    return nullptr;
}

std::vector<SimilarityVerdict> RunReport::verdicts() const {
    std::vector<SimilarityVerdict> out;
    for (const auto& c : candidates)
        if (c.verdict) out.push_back(*c.verdict);
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string new_run_id() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    std::random_device rd;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%08x", static_cast<unsigned>(rd()));
    return std::string("run-") + stamp + "-" + suffix;
}

KnownTerms load_known_terms(const SeedLexicon& seeds, const std::string& known_terms_path,
                            const LanguageResources& res) {
    KnownTerms known;
    for (const auto& e : seeds.entries()) {
        auto form = lemma_form(e.expression, res);
        if (!form.empty()) known.insert(std::move(form));
    }
    if (!known_terms_path.empty() && fs::exists(known_terms_path))
        for (const auto& term : text::read_list_file(known_terms_path)) {
            auto form = lemma_form(term, res);
            if (!form.empty()) known.insert(std::move(form));
        }
    return known;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

RunResult run_pipeline(RunConfig config) {
    auto provider = stage("config", [&] {
        config.resolve();
        return make_provider(config.embedder);
    });
    return run_pipeline(std::move(config), std::move(provider));
}

RunResult run_pipeline(RunConfig config, std::shared_ptr<const EmbeddingProvider> provider) {
    stage("config", [&] {
        config.resolve();
        if (!provider) throw InvalidArgument("no embedding provider");
    });

    RunReport report;
    report.config = config;

    struct Inputs {
        LanguageResources res;
        Corpus corpus;
        SeedLexicon seeds;
        SeedLexicon analysis_seeds;
        MarkerLexicon markers = MarkerLexicon::defaults();
        KnownTerms known;
        std::optional<GoldStandard> gold;
    };
    auto in = stage("load", [&] {
        Inputs in;
        in.res = LanguageResources::load(config.data_dir);
        in.corpus = load_posts(config.posts_path);
        in.seeds = load_seeds(config.seeds_path);
        validate_corpus(in.corpus, in.seeds);
        in.analysis_seeds = filter_seeds_by_support(in.corpus, in.seeds, config.min_posts);
        in.markers = MarkerLexicon::load(config.markers_path);
        in.known = load_known_terms(in.seeds, config.known_terms_path, in.res);
        if (!config.gold_path.empty()) in.gold = load_gold(config.gold_path);
        return in;
    });
    report.analysis_seeds = in.analysis_seeds.expressions();
    for (const auto& e : in.seeds.entries())
        if (!in.analysis_seeds.contains(e.expression) && e.provenance == "initial")
            report.warnings.push_back("seed \"" + e.expression + "\" has " +
                                      std::to_string(in.corpus.support(e.expression)) + " posts (< " +
                                      std::to_string(config.min_posts) + "); excluded from analysis");
    if (in.analysis_seeds.empty()) report.warnings.push_back("no seed meets the support threshold");

    const auto posts = stage("preprocess", [&] {
        std::vector<ProcessedPost> out(in.corpus.size());
        parallel_for(out.size(), config.threads, [&](std::size_t i) { out[i] = preprocess_post(in.corpus[i], in.res); });
        return out;
    });

    std::vector<std::string> seed_terms;
    for (const auto& expr : in.analysis_seeds.expressions()) {
        auto form = lemma_form(expr, in.res);
        if (!form.empty() && std::find(seed_terms.begin(), seed_terms.end(), form) == seed_terms.end())
            seed_terms.push_back(std::move(form));
    }

    auto trending = stage("trending", [&] {
        const auto docs = documents_from_posts(posts);
        const auto matrix = build_tfidf(docs);
        const auto freqs = corpus_frequencies(matrix, docs);
        std::vector<CandidateTerm> terms;
        if (extractor_of(config.variant) == Origin::tfidf) {
            TrendingDiagnostics diag;
            terms = select_trending(matrix, freqs, config.top_k, &diag);
            if (diag.survivors < config.top_k)
                report.warnings.push_back("only " + std::to_string(diag.survivors) +
                                          " terms reach the TF-IDF threshold; fewer than top_k=" +
                                          std::to_string(config.top_k));
        } else {
            if (seed_terms.empty()) throw InvalidArgument("collocation extraction needs at least one seed");
            std::vector<std::vector<std::string>> patterns;
            for (const auto& s : seed_terms) patterns.push_back(text::split_words(s));
            terms = colloc_trending(posts, patterns, {config.colloc_width, config.colloc_min_frequency});
            const auto stats = term_stats(matrix, freqs);
            for (auto& c : terms)
                if (auto col = matrix.column_of(c.term); col < matrix.columns()) c.max_tfidf = stats[col].max_tfidf;
        }
        return terms;
    });
    for (const auto& c : trending) report.trending.push_back({c.term, c.frequency, c.max_tfidf, c.doc_count});

    auto removal = stage("removal", [&] { return apply_removal(trending, in.known, in.markers); });
    report.removed = removal.removed;

    const auto strategy = strategy_of(config.variant);
    auto [term_table, seed_table] = stage("embedding", [&] {
        std::vector<std::string> terms;
        for (const auto& c : removal.kept) terms.push_back(c.term);
        auto t = embed_terms(terms, posts, config.windows, strategy, *provider, config.threads);
        auto s = embed_terms(seed_terms, posts, config.windows, strategy, *provider, config.threads);
        for (const auto& term : t.no_context) report.no_context.push_back(term);
        for (const auto& seed : s.no_context) {
            report.no_context.push_back(seed);
            report.warnings.push_back("seed \"" + seed + "\" has no context; excluded from comparison");
        }
        return std::pair{std::move(t.table), std::move(s.table)};
    });

    auto verdicts = stage("similarity", [&] {
        if (seed_table.empty()) throw InvalidArgument("no seed embeddings to compare against");
        return judge_terms(term_table, seed_table, config.windows, config.vote_m, config.threshold);
    });
    std::map<std::string, const SimilarityVerdict*> by_term;
    for (const auto& v : verdicts) by_term[v.term] = &v;
    if (!verdicts.empty())
        for (const auto& w : verdicts.front().windows) report.gamma_per_window[w.window] = w.gamma;

    for (const auto& c : removal.kept) {
        CandidateRecord rec{c, std::nullopt};
        if (auto it = by_term.find(c.term); it != by_term.end()) rec.verdict = *it->second;
        for (const auto& id : c.source_post_ids)
            if (const auto* p = in.corpus.find(id)) report.source_posts.emplace(id, *p);
        report.candidates.push_back(std::move(rec));
    }

    if (in.gold) report.metrics = stage("evaluate", [&] { return evaluate_run(verdicts, *in.gold); });

    report.run_id = new_run_id();
    report.created_at = utc_timestamp();

    RunResult result{std::move(report), {}};
    if (!config.out_dir.empty())
        result.run_dir = stage("persist", [&] { return persist_run(result.report, config.out_dir); });
    return result;
}

std::vector<std::string> antisemitic_verdict_terms(const std::map<std::string, HumanVerdict>& active) {
    std::vector<std::string> out;
    for (const auto& [term, v] : active)
        if (v.label == ReviewLabel::antisemitic) out.push_back(term);
    return out;
}

PromotionResult promote_terms(const RunReport& report, const std::map<std::string, HumanVerdict>& active,
                              const std::vector<std::string>& accepted) {
    for (const auto& term : accepted) {
        if (!report.find(term)) throw InvalidArgument("term \"" + term + "\" is not a candidate of " + report.run_id);
        auto it = active.find(term);
        if (it == active.end())
            throw InvalidArgument("term \"" + term + "\" has no human verdict; record one before promoting");
        if (it->second.label != ReviewLabel::antisemitic)
            throw InvalidArgument("term \"" + term + "\" has human verdict " + std::string(to_string(it->second.label)) +
                                  "; only antisemitic verdicts can be promoted");
    }

    const auto& seeds_path = report.config.seeds_path;
    const auto& known_path = report.config.known_terms_path;
    auto seeds = load_seeds(seeds_path);
    std::set<std::string> known;
    if (fs::exists(known_path))
        for (auto& t : text::read_list_file(known_path)) known.insert(text::lower(t));

    PromotionResult result;
    std::string seed_lines, known_lines;
    for (const auto& term : accepted) {
        bool added = false;
        if (!seeds.contains(term)) {
            seeds.add(term, "promoted:" + report.run_id);
            seed_lines += term + "\tpromoted:" + report.run_id + "\n";
            added = true;
        }
        if (known.insert(term).second) {
            known_lines += term + "\n";
            added = true;
        }
        (added ? result.promoted : result.already_known).push_back(term);
    }
    auto append = [](const std::string& path, const std::string& lines) {
        if (lines.empty()) return;
        std::string existing = fs::exists(path) ? text::read_file(path) : std::string{};
        if (!existing.empty() && existing.back() != '\n') existing += '\n';
        text::write_file_atomic(path, existing + lines);
    };
    append(seeds_path, seed_lines);
    append(known_path, known_lines);
    return result;
}

}  // namespace trendlex
