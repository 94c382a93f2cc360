#include <filesystem>
#include <json.hpp>

#include "json_codec.hpp"
#include "trendlex/error.hpp"
#include "trendlex/pipeline.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "trendlex.report/1";

ojson config_to_json(const RunConfig& c) {
    ojson j;
    j["variant"] = to_string(c.variant);
    j["top_k"] = c.top_k;
    j["windows"] = c.windows;
    j["vote_m"] = c.vote_m;
    j["embedder"] = c.embedder;
    j["posts_path"] = c.posts_path;
    j["seeds_path"] = c.seeds_path;
    j["gold_path"] = c.gold_path;
    j["known_terms_path"] = c.known_terms_path;
    j["markers_path"] = c.markers_path;
    j["data_dir"] = c.data_dir;
    j["out_dir"] = c.out_dir;
    j["min_posts"] = c.min_posts;
    j["colloc_width"] = c.colloc_width;
    j["colloc_min_frequency"] = c.colloc_min_frequency;
    j["threshold"] = to_string(c.threshold);
    j["threads"] = c.threads;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.top_k = j.at("top_k").get<std::size_t>();
    c.windows = j.at("windows").get<std::vector<std::size_t>>();
    c.vote_m = j.at("vote_m").get<std::size_t>();
    c.embedder = j.at("embedder").get<std::string>();
    c.posts_path = j.at("posts_path").get<std::string>();
    c.seeds_path = j.at("seeds_path").get<std::string>();
    c.gold_path = j.at("gold_path").get<std::string>();
    c.known_terms_path = j.at("known_terms_path").get<std::string>();
    c.markers_path = j.at("markers_path").get<std::string>();
    c.data_dir = j.at("data_dir").get<std::string>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.min_posts = j.at("min_posts").get<std::size_t>();
    c.colloc_width = j.at("colloc_width").get<std::size_t>();
    c.colloc_min_frequency = j.at("colloc_min_frequency").get<std::size_t>();
    c.threshold = parse_threshold_mode(j.at("threshold").get<std::string>());
    c.threads = j.at("threads").get<std::size_t>();
    return c;
}

ojson candidate_to_json(const CandidateRecord& r) {
    const auto& c = r.candidate;
    ojson j;
    j["term"] = c.term;
    j["n"] = c.n;
    j["origin"] = to_string(c.origin);
    j["frequency"] = c.frequency;
    j["max_tfidf"] = c.max_tfidf;
    j["doc_count"] = c.doc_count;
    j["source_post_ids"] = c.source_post_ids;
    if (r.verdict) {
        ojson v;
        v["final_label"] = to_string(r.verdict->final_label);
        v["vote_count"] = r.verdict->vote_count;
        v["windows"] = ojson::array();
        for (const auto& w : r.verdict->windows)
            v["windows"].push_back({{"window", w.window}, {"score", w.score}, {"label", w.label}, {"gamma", w.gamma}});
        j["verdict"] = std::move(v);
    } else {
        j["verdict"] = nullptr;
    }
    return j;
}

CandidateRecord candidate_from_json(const json& j) {
    CandidateRecord r;
    auto& c = r.candidate;
    c.term = j.at("term").get<std::string>();
    c.n = j.at("n").get<std::size_t>();
    c.origin = parse_origin(j.at("origin").get<std::string>());
    c.frequency = j.at("frequency").get<std::size_t>();
    c.max_tfidf = j.at("max_tfidf").get<double>();
    c.doc_count = j.at("doc_count").get<std::size_t>();
    c.source_post_ids = j.at("source_post_ids").get<std::vector<std::string>>();
    if (const auto& v = j.at("verdict"); !v.is_null()) {
        SimilarityVerdict sv;
        sv.term = c.term;
        auto label = parse_label(v.at("final_label").get<std::string>());
        if (!label) throw Error("bad final_label in report");
        sv.final_label = *label;
        sv.vote_count = v.at("vote_count").get<std::size_t>();
        for (const auto& w : v.at("windows"))
            sv.windows.push_back({w.at("window").get<std::size_t>(), w.at("score").get<double>(),
                                  w.at("label").get<int>(), w.at("gamma").get<double>()});
        r.verdict = std::move(sv);
    }
    return r;
}

ojson metrics_to_json(const MetricsReport& m) {
    ojson j;
    j["tp"] = m.confusion.tp;
    j["fp"] = m.confusion.fp;
    j["fn"] = m.confusion.fn;
    j["tn"] = m.confusion.tn;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f_score"] = m.f_score;
    j["rounded"] = {{"accuracy", round2(m.accuracy)},
                    {"precision", round2(m.precision)},
                    {"recall", round2(m.recall)},
                    {"f_score", round2(m.f_score)}};
    j["unlabeled"] = m.unlabeled;
    return j;
}

MetricsReport metrics_from_json(const json& j) {
    MetricsReport m;
    m.confusion = {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>(),
                   j.at("tn").get<std::size_t>()};
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f_score = j.at("f_score").get<double>();
    m.unlabeled = j.at("unlabeled").get<std::vector<std::string>>();
    return m;
}

ojson post_to_json(const Post& p) {
    return ojson{{"id", p.id},
                 {"platform", p.platform},
                 {"timestamp", p.timestamp},
                 {"text", p.text},
                 {"matched_seed", p.matched_seed}};
}

ojson candidates_json(const RunReport& r) {
    ojson arr = ojson::array();
    for (const auto& c : r.candidates) arr.push_back(candidate_to_json(c));
    return arr;
}

}  // namespace

std::string render_config(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string render_candidates(const RunReport& report) { return candidates_json(report).dump(2) + "\n"; }

std::string render_terms(const RunReport& report) {
    ojson arr = ojson::array();
    for (const auto& t : report.trending)
        arr.push_back({{"term", t.term}, {"frequency", t.frequency}, {"max_tfidf", t.max_tfidf}});
    return arr.dump(2) + "\n";
}

std::string render_report(const RunReport& r) {
    ojson j;
    j["schema"] = kSchema;
    j["run_id"] = r.run_id;
    j["created_at"] = r.created_at;
    j["config"] = config_to_json(r.config);
    j["analysis_seeds"] = r.analysis_seeds;
    j["trending"] = ojson::array();
    for (const auto& t : r.trending)
        j["trending"].push_back(
            {{"term", t.term}, {"frequency", t.frequency}, {"max_tfidf", t.max_tfidf}, {"doc_count", t.doc_count}});
    j["removed"] = ojson::array();
    for (const auto& t : r.removed) j["removed"].push_back({{"term", t.term}, {"reason", to_string(t.reason)}});
    j["no_context"] = r.no_context;
    j["candidates"] = candidates_json(r);
    j["gamma_per_window"] = ojson::array();
    for (const auto& [w, g] : r.gamma_per_window) j["gamma_per_window"].push_back({{"window", w}, {"gamma", g}});
    j["source_posts"] = ojson::array();
    for (const auto& [_, p] : r.source_posts) j["source_posts"].push_back(post_to_json(p));
    j["metrics"] = r.metrics ? metrics_to_json(*r.metrics) : ojson(nullptr);
    j["warnings"] = r.warnings;
    j["human_verdicts"] = ojson::array();
    for (const auto& v : r.human_verdicts) j["human_verdicts"].push_back(ojson::parse(verdict_to_json(v).dump()));
    return j.dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("report.json", 0, e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != kSchema)
            throw Error("unsupported report schema " + j.at("schema").get<std::string>());
        RunReport r;
        r.run_id = j.at("run_id").get<std::string>();
        r.created_at = j.at("created_at").get<std::string>();
        r.config = config_from_json(j.at("config"));
        r.analysis_seeds = j.at("analysis_seeds").get<std::vector<std::string>>();
        for (const auto& t : j.at("trending"))
            r.trending.push_back({t.at("term").get<std::string>(), t.at("frequency").get<std::size_t>(),
                                  t.at("max_tfidf").get<double>(), t.at("doc_count").get<std::size_t>()});
        for (const auto& t : j.at("removed")) {
            const auto reason = t.at("reason").get<std::string>();
            RemovalReason rr = reason == "embedded_bigram" ? RemovalReason::embedded_bigram
                               : reason == "known"         ? RemovalReason::known
                               : reason == "overt"         ? RemovalReason::overt
                                                           : throw Error("bad removal reason " + reason);
            r.removed.push_back({t.at("term").get<std::string>(), rr});
        }
        r.no_context = j.at("no_context").get<std::vector<std::string>>();
        for (const auto& c : j.at("candidates")) r.candidates.push_back(candidate_from_json(c));
        for (const auto& g : j.at("gamma_per_window"))
            r.gamma_per_window[g.at("window").get<std::size_t>()] = g.at("gamma").get<double>();
        for (const auto& p : j.at("source_posts")) {
            Post post{p.at("id").get<std::string>(), p.at("platform").get<std::string>(),
                      p.at("timestamp").get<std::string>(), p.at("text").get<std::string>(),
                      p.at("matched_seed").get<std::string>()};
            r.source_posts.emplace(post.id, std::move(post));
        }
        if (!j.at("metrics").is_null()) r.metrics = metrics_from_json(j.at("metrics"));
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (const auto& v : j.at("human_verdicts")) r.human_verdicts.push_back(verdict_from_json(v));
        return r;
    } catch (const json::exception& e) {
        throw ParseError("report.json", 0, e.what());
    }
}

RunReport load_report(const std::string& path) {
    try {
        return parse_report(text::read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path, 0, e.what());
    }
}

std::string persist_run(const RunReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path final_dir = fs::path(out_dir) / report.run_id;
    const fs::path staging = fs::path(out_dir) / ("." + report.run_id + ".partial");
    if (fs::exists(final_dir)) throw Error("run directory already exists: " + final_dir.string());
    fs::create_directories(staging);
    try {
        text::write_file_atomic((staging / "config.json").string(), render_config(report.config));
        text::write_file_atomic((staging / "terms.json").string(), render_terms(report));
        text::write_file_atomic((staging / "report.json").string(), render_report(report));
        fs::rename(staging, final_dir);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
    return final_dir.string();
}

void sync_human_verdicts(const std::string& run_dir) {
    const auto path = run_dir + "/report.json";
    auto report = load_report(path);
    report.human_verdicts = VerdictStore(run_dir).history();
    text::write_file_atomic(path, render_report(report));
}

}  // namespace trendlex
