#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <filesystem>
#include <sstream>

#include "trendlex/pipeline.hpp"
#include "trendlex/provider.hpp"
#include "trendlex/review_service.hpp"
#include "trendlex/text.hpp"

namespace {

using namespace trendlex;

int fail(const std::string& message, const std::string& stage) {
    nlohmann::json j{{"error", message}, {"stage", stage}};
    std::cerr << j.dump() << "\n";
    return 1;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');)
        if (auto t = text::trim(item); !t.empty()) out.emplace_back(t);
    return out;
}

std::string default_embedder() {
    if (const char* url = std::getenv("TRENDLEX_EMBEDDER_URL"); url && *url) return std::string("http:") + url;
    return "stub:42";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trendlex: discover emerging coded terms in a post corpus"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string variant = "tfidf-posttrunc";
    std::string windows;
    std::string record_path;
    cfg.embedder = default_embedder();
    cfg.out_dir = "runs";
    auto* run = app.add_subcommand("run", "run the pipeline and persist a report");
    run->add_option("--posts", cfg.posts_path, "posts JSONL")->required();
    run->add_option("--seeds", cfg.seeds_path, "seed lexicon (one expression per line)")->required();
    run->add_option("--variant", variant, "pipeline variant")
        ->check(CLI::IsMember({"colloc-pretrunc", "colloc-posttrunc", "tfidf-pretrunc", "tfidf-posttrunc"}));
    run->add_option("--embedder", cfg.embedder, "stub:<seed> | file:<path> | http:<url>");
    run->add_option("--gold", cfg.gold_path, "gold standard CSV");
    run->add_option("--out-dir", cfg.out_dir, "parent directory for run directories");
    run->add_option("--top-k", cfg.top_k, "TF-IDF candidate cap")->check(CLI::PositiveNumber);
    run->add_option("--vote-m", cfg.vote_m, "windows that must vote antisemitic (0: variant default)");
    run->add_option("--windows", windows, "comma-separated window sizes (default: variant)");
    run->add_option("--min-posts", cfg.min_posts, "posts a seed needs to enter the analysis")->check(CLI::PositiveNumber);
    run->add_option("--known-terms", cfg.known_terms_path, "known terms list (default: next to seeds)");
    run->add_option("--markers", cfg.markers_path, "overt marker words (default: bundled)");
    run->add_option("--data-dir", cfg.data_dir, "language data directory (default: bundled)");
    run->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--record", record_path, "append embedder traffic to this JSONL fixture");

    std::string report_path, gold_path;
    bool csv = false;
    auto* eval = app.add_subcommand("eval", "score an existing report against a gold file");
    eval->add_option("--report", report_path, "report.json or run directory")->required();
    eval->add_option("--gold", gold_path, "gold standard CSV")->required();
    eval->add_flag("--csv", csv, "print CSV instead of a table row");

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string runs_dir = "runs";
    std::string cors = "*";
    auto* serve = app.add_subcommand("serve", "serve the review API");
    serve->add_option("--port", port, "listen port")->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "listen address");
    serve->add_option("--runs-dir", runs_dir, "directory holding run directories");
    serve->add_option("--cors-origin", cors, "Access-Control-Allow-Origin value");

    std::string run_dir, terms;
    auto* promote = app.add_subcommand("promote", "promote antisemitic-verdict terms into the lexicons");
    promote->add_option("--run-dir", run_dir, "run directory")->required();
    promote->add_option("--terms", terms, "comma-separated subset (default: every antisemitic verdict)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*run) {
            cfg.variant = parse_variant(variant);
            for (const auto& w : split_csv(windows)) cfg.windows.push_back(std::stoul(w));
            std::shared_ptr<const EmbeddingProvider> provider;
            try {
                provider = make_provider(cfg.embedder);
                if (!record_path.empty()) provider = std::make_shared<RecordingProvider>(provider, record_path);
            } catch (const std::exception& e) {
                return fail(e.what(), "config");
            }
            auto result = run_pipeline(cfg, provider);
            for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << result.run_dir << "\n";
            if (result.report.metrics)
                std::cout << table_row(to_string(result.report.config.variant),
                                       approach_of(result.report.config.variant), *result.report.metrics)
                          << "\n";
            return 0;
        }
        if (*eval) {
            if (text::trim(report_path).empty()) return fail("empty report path", "eval");
            auto path = report_path;
            if (std::filesystem::is_directory(path)) path += "/report.json";
            const auto report = load_report(path);
            const auto gold = load_gold(gold_path);
            const auto verdicts = report.verdicts();
            const auto m = evaluate_run(verdicts, gold);
            const auto name = to_string(report.config.variant);
            const auto approach = approach_of(report.config.variant);
            if (csv)
                std::cout << csv_header() << "\n" << csv_row(name, approach, m) << "\n";
            else
                std::cout << table_row(name, approach, m) << "\n";
            return 0;
        }
        if (*serve) {
            ReviewService service({runs_dir, cors});
            std::cerr << "serving " << runs_dir << " on http://" << host << ":" << port << "\n";
            if (!service.listen(host, port)) return fail("cannot bind " + host + ":" + std::to_string(port), "serve");
            return 0;
        }
        if (*promote) {
            const auto report = load_report(run_dir + "/report.json");
            const auto active = VerdictStore(run_dir).active();
            auto accepted = split_csv(terms);
            if (accepted.empty()) accepted = antisemitic_verdict_terms(active);
            const auto result = promote_terms(report, active, accepted);
            for (const auto& t : result.promoted) std::cout << "promoted\t" << t << "\n";
            for (const auto& t : result.already_known) std::cout << "known\t" << t << "\n";
            return 0;
        }
    } catch (const StageError& e) {
        return fail(e.detail(), e.stage());
    } catch (const std::exception& e) {
        return fail(e.what(), app.get_subcommands().empty() ? "cli" : app.get_subcommands().front()->get_name());
    }
    return 0;
}
