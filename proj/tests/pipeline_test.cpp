#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "support.hpp"
#include "trendlex/error.hpp"
#include "trendlex/pipeline.hpp"
#include "trendlex/provider.hpp"
#include "trendlex/verdicts.hpp"

#include <json.hpp>

using namespace trendlex;
using trendlex::testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const EmbeddingProvider> small_stub() {
    return std::make_shared<StubProvider>(StubOptions{.dim = 16});
}

RunConfig fixture_config(const TempDir& dir, Variant v) {
    RunConfig c;
    c.variant = v;
    c.posts_path = dir.file("posts.jsonl");
    c.seeds_path = dir.file("seeds.txt");
    c.gold_path = dir.file("gold.csv");
    c.embedder = "stub:42";
    return c;
}

class FailingProvider final : public EmbeddingProvider {
public:
    std::size_t dim() const override { return 16; }
    std::size_t layers() const override { return 12; }
    std::size_t max_tokens() const override { return 512; }
    std::string describe() const override { return "failing"; }
    std::vector<SequenceEmbedding> embed(std::span<const std::string>) const override {
        throw TransportError("sidecar went away");
    }
};

HumanVerdict verdict(const RunReport& r, std::string term, ReviewLabel label) {
    HumanVerdict v;
    v.term = std::move(term);
    v.run_id = r.run_id;
    v.label = label;
    v.reviewer = "tester";
    return v;
}

std::size_t count_entries(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_CASE("Variant.NamesAndStrategyPoints") {
    for (auto v : {Variant::colloc_pretrunc, Variant::colloc_posttrunc, Variant::tfidf_pretrunc, Variant::tfidf_posttrunc})
        CHECK_EQ(parse_variant(to_string(v)), v);
    CHECK_EQ(to_string(Variant::tfidf_posttrunc), "tfidf-posttrunc");
    CHECK_EQ(extractor_of(Variant::colloc_posttrunc), Origin::colloc);
    CHECK_EQ(strategy_of(Variant::tfidf_pretrunc), Strategy::pretruncate);
    CHECK_EQ(approach_of(Variant::colloc_pretrunc), "standard");
    CHECK_EQ(approach_of(Variant::tfidf_posttrunc), "advanced");
    CHECK_EQ(approach_of(Variant::colloc_posttrunc), "hybrid");
    CHECK_THROWS_AS(parse_variant("bogus"), InvalidArgument);
}

TEST_CASE("RunConfig.VariantDefaults") {
    RunConfig c;
    c.posts_path = "p";
    c.seeds_path = "dir/seeds.txt";
    c.variant = Variant::colloc_pretrunc;
    c.resolve();
    CHECK_EQ(c.windows, (std::vector<std::size_t>{5, 6, 7, 8, 9, 10, 11, 12, 13, 14}));
    CHECK_EQ(c.vote_m, 7u);
    CHECK_EQ(c.known_terms_path, "dir/known_terms.txt");
    RunConfig d = c;
    d.variant = Variant::tfidf_posttrunc;
    d.windows.clear();
    d.vote_m = 0;
    d.resolve();
    CHECK_EQ(d.windows, (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    CHECK_EQ(d.vote_m, 9u);
}

TEST_CASE("RunConfig.Overrides") {
    RunConfig c;
    c.posts_path = "p";
    c.seeds_path = "s";
    c.windows = {3, 1, 3, 2};
    c.vote_m = 2;
    c.resolve();
    CHECK_EQ(c.windows, (std::vector<std::size_t>{1, 2, 3}));
    CHECK_EQ(c.vote_m, 2u);
    c.vote_m = 4;
    CHECK_THROWS_AS(c.resolve(), InvalidArgument);
    RunConfig k = c;
    k.vote_m = 1;
    k.top_k = 0;
    CHECK_THROWS_AS(k.resolve(), InvalidArgument);
    RunConfig missing;
    CHECK_THROWS_AS(missing.resolve(), InvalidArgument);
}

TEST_CASE("RunId.Format") {
    const auto a = new_run_id(), b = new_run_id();
    CHECK_NE(a, b);
    CHECK_EQ(a.rfind("run-", 0), 0u);
    CHECK_EQ(utc_timestamp().size(), 20u);
}

TEST_CASE("Pipeline.CollocFixtureCounts") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto r = run_pipeline(fixture_config(dir, Variant::colloc_pretrunc), small_stub()).report;
    CHECK_EQ(r.analysis_seeds.size(), 14u);
    CHECK_EQ(r.trending.size(), 74u);
    CHECK_EQ(r.removed.size(), 22u);
    CHECK_EQ(r.candidates.size(), 52u);
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                            [](const std::string& w) { return w.find("\"jew down\"") != std::string::npos; }));
    for (const auto& c : r.candidates) {
        CHECK_EQ(c.candidate.origin, Origin::colloc);
        REQUIRE(c.verdict);
        CHECK_EQ(c.verdict->windows.size(), 10u);
        for (const auto& id : c.candidate.source_post_ids) CHECK(r.source_posts.contains(id));
    }
    REQUIRE(r.metrics);
    CHECK_EQ(r.metrics->confusion.total(), 52u);
    CHECK_EQ(r.metrics->confusion.tp + r.metrics->confusion.fn, 7u);
}

TEST_CASE("Pipeline.TfidfFixtureCounts") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto r = run_pipeline(fixture_config(dir, Variant::tfidf_posttrunc), small_stub()).report;
    CHECK_EQ(r.trending.size(), 200u);
    CHECK_EQ(r.candidates.size(), 94u);
    CHECK_EQ(r.config.vote_m, 9u);
    REQUIRE(r.metrics);
    CHECK_EQ(r.metrics->confusion.tp + r.metrics->confusion.fn, 29u);
    for (std::size_t i = 1; i < r.candidates.size(); ++i)
        CHECK_GE(r.candidates[i - 1].candidate.frequency, r.candidates[i].candidate.frequency);
    CHECK(r.find("deep state"));
    CHECK(r.find("fema camps"));
    CHECK_FALSE(r.find("new world order"));
}

TEST_CASE("Pipeline.ReportRoundTripsAndPersists") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto cfg = fixture_config(dir, Variant::colloc_posttrunc);
    cfg.out_dir = dir.file("runs");
    auto res = run_pipeline(cfg, small_stub());
    CHECK_EQ(parse_report(render_report(res.report)), res.report);
    REQUIRE_FALSE(res.run_dir.empty());
    for (const char* f : {"config.json", "terms.json", "report.json"}) CHECK(fs::exists(fs::path(res.run_dir) / f));
    CHECK_EQ(count_entries(cfg.out_dir), 1u);
    CHECK_EQ(load_report(res.run_dir + "/report.json"), res.report);
    CHECK_EQ(text::read_file(res.run_dir + "/terms.json"), render_terms(res.report));
    auto terms = nlohmann::json::parse(render_terms(res.report));
    REQUIRE_FALSE(terms.empty());
    CHECK_EQ(terms[0].size(), 3u);
    CHECK(terms[0].contains("max_tfidf"));
    CHECK_THROWS_AS(persist_run(res.report, cfg.out_dir), Error);
}

TEST_CASE("Pipeline.DeterministicAcrossRunsAndThreads") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto cfg = fixture_config(dir, Variant::tfidf_pretrunc);
    auto a = run_pipeline(cfg, small_stub()).report;
    cfg.threads = 3;
    auto b = run_pipeline(cfg, small_stub()).report;
    CHECK_NE(a.run_id, b.run_id);
    CHECK_EQ(render_candidates(a), render_candidates(b));
    CHECK_EQ(render_terms(a), render_terms(b));
    CHECK_EQ(a.gamma_per_window, b.gamma_per_window);
}

TEST_CASE("Pipeline.StageErrorsAreTaggedAndNothingPersists") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto cfg = fixture_config(dir, Variant::tfidf_posttrunc);
    cfg.out_dir = dir.file("runs");
    try {
        run_pipeline(cfg, std::make_shared<FailingProvider>());
        FAIL("no exception thrown");
    } catch (const StageError& e) {
        CHECK_EQ(e.stage(), "embedding");
        CHECK_NE(std::string(e.what()).find("sidecar went away"), std::string::npos);
    }
    CHECK((!fs::exists(cfg.out_dir) || count_entries(cfg.out_dir) == 0));

    auto bad = cfg;
    bad.posts_path = dir.file("missing.jsonl");
    try {
        run_pipeline(bad, small_stub());
        FAIL("no exception thrown");
    } catch (const StageError& e) {
        CHECK_EQ(e.stage(), "load");
    }
    auto cfg_err = cfg;
    cfg_err.vote_m = 99;
    try {
        run_pipeline(cfg_err, small_stub());
        FAIL("no exception thrown");
    } catch (const StageError& e) {
        CHECK_EQ(e.stage(), "config");
    }
}

TEST_CASE("Pipeline.UnknownMatchedSeedFailsLoad") {
    TempDir dir;
    dir.write("posts.jsonl", R"({"id":"p1","platform":"gab","timestamp":"t","text":"deep state","matched_seed":"nope"})"
                             "\n");
    dir.write("seeds.txt", "cabal\n");
    RunConfig c;
    c.posts_path = dir.file("posts.jsonl");
    c.seeds_path = dir.file("seeds.txt");
    try {
        run_pipeline(c, small_stub());
        FAIL("no exception thrown");
    } catch (const StageError& e) {
        CHECK_EQ(e.stage(), "load");
    }
}

TEST_CASE("Promotion.ClosureAndIdempotence") {
    TempDir dir;
    trendlex::testing::copy_full_scale(dir);
    auto cfg = fixture_config(dir, Variant::colloc_pretrunc);
    cfg.out_dir = dir.file("runs");
    auto first = run_pipeline(cfg, small_stub());
    REQUIRE(first.report.find("fema camps"));
    VerdictStore store(first.run_dir);
    store.record(verdict(first.report, "fema camps", ReviewLabel::antisemitic), std::nullopt);
    store.record(verdict(first.report, "end game", ReviewLabel::neutral_in_antisemitic_context), std::nullopt);

    const auto seeds_before = text::read_file(cfg.seeds_path);
    CHECK_THROWS_AS(promote_terms(first.report, store.active(), {"fema camps", "end game"}), InvalidArgument);
    CHECK_THROWS_AS(promote_terms(first.report, store.active(), {"deep state"}), InvalidArgument);
    CHECK_THROWS_AS(promote_terms(first.report, store.active(), {"not a candidate"}), InvalidArgument);
    CHECK_EQ(text::read_file(cfg.seeds_path), seeds_before);

    CHECK_EQ(antisemitic_verdict_terms(store.active()), std::vector<std::string>{"fema camps"});
    auto p = promote_terms(first.report, store.active(), {"fema camps"});
    CHECK_EQ(p.promoted, std::vector<std::string>{"fema camps"});
    auto seeds = load_seeds(cfg.seeds_path);
    REQUIRE(seeds.contains("fema camps"));
    CHECK_EQ(seeds.entries().back().provenance, "promoted:" + first.report.run_id);

    auto again = promote_terms(first.report, store.active(), {"fema camps"});
    CHECK(again.promoted.empty());
    CHECK_EQ(again.already_known, std::vector<std::string>{"fema camps"});
    CHECK_EQ(load_seeds(cfg.seeds_path).size(), seeds.size());

    auto second = run_pipeline(cfg, small_stub()).report;
    CHECK_FALSE(second.find("fema camps"));
    CHECK((std::find(second.removed.begin(), second.removed.end(),
                          RemovedTerm{"fema camps", RemovalReason::known}) != second.removed.end() ||
                std::none_of(second.trending.begin(), second.trending.end(),
                             [](const TermStats& t) { return t.term == "fema camps"; })));
}

TEST_CASE("KnownTerms.SeedsAndFileInLemmaForm") {
    TempDir dir;
    dir.write("known.txt", "# promoted\nGlobalist Bankers\n");
    SeedLexicon seeds;
    seeds.add("new world order");
    seeds.add("jews");
    auto k = load_known_terms(seeds, dir.file("known.txt"), trendlex::testing::resources());
    CHECK(k.contains("new world order"));
    CHECK(k.contains("jew"));
    CHECK(k.contains("globalist banker"));
    CHECK_EQ(load_known_terms(seeds, dir.file("absent.txt"), trendlex::testing::resources()).size(), 2u);
}
