#include "trendlex/review_service.hpp"

#include <filesystem>
#include <httplib.h>
#include <json.hpp>
#include <mutex>
#include <regex>
#include <thread>

#include "json_codec.hpp"
#include "trendlex/pipeline.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

HttpReply reply(int status, const json& body) { return {status, body.dump()}; }

HttpReply error_reply(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

bool valid_run_id(const std::string& id) {
    static const std::regex re(R"([A-Za-z0-9_][A-Za-z0-9._-]*)");
    return std::regex_match(id, re);
}

}  // namespace

struct ReviewService::Impl {
    ReviewServiceOptions options;
    std::mutex locks_guard;
    std::map<std::string, std::unique_ptr<std::mutex>> run_locks;
    httplib::Server server;
    std::thread worker;

    std::mutex& lock_for(const std::string& run_id) {
        std::lock_guard g(locks_guard);
        auto& m = run_locks[run_id];
        if (!m) m = std::make_unique<std::mutex>();
        return *m;
    }

    std::optional<std::string> run_dir(const std::string& id) const {
        if (!valid_run_id(id)) return std::nullopt;
        auto dir = fs::path(options.runs_dir) / id;
        if (!fs::exists(dir / "report.json")) return std::nullopt;
        return dir.string();
    }

    HttpReply list_runs() const {
        json runs = json::array();
        std::vector<fs::path> dirs;
        if (fs::is_directory(options.runs_dir))
            for (const auto& e : fs::directory_iterator(options.runs_dir))
                if (e.is_directory() && valid_run_id(e.path().filename().string()) &&
                    fs::exists(e.path() / "report.json"))
                    dirs.push_back(e.path());
        std::sort(dirs.begin(), dirs.end());
        for (const auto& d : dirs) {
            RunReport r;
            try {
                r = load_report((d / "report.json").string());
            } catch (const Error&) {
                continue;
            }
            const auto active = VerdictStore(d.string()).active();
            json s{{"run_id", r.run_id},
                   {"created_at", r.created_at},
                   {"variant", to_string(r.config.variant)},
                   {"approach", approach_of(r.config.variant)},
                   {"embedder", r.config.embedder},
                   {"candidates", r.candidates.size()},
                   {"reviewed", active.size()}};
            if (r.metrics)
                s["metrics"] = {{"accuracy", round2(r.metrics->accuracy)},
                                {"precision", round2(r.metrics->precision)},
                                {"recall", round2(r.metrics->recall)},
                                {"f_score", round2(r.metrics->f_score)}};
            else
                s["metrics"] = nullptr;
            runs.push_back(std::move(s));
        }
        return reply(200, json{{"runs", runs}});
    }

    HttpReply candidates(const std::string& dir) const {
        const auto raw = json::parse(text::read_file(dir + "/report.json"));
        std::map<std::string, json> posts;
        for (const auto& p : raw.at("source_posts")) posts[p.at("id").get<std::string>()] = p;
        const auto active = VerdictStore(dir).active();
        json out = json::array();
        for (auto c : raw.at("candidates")) {
            json cited = json::array();
            for (const auto& id : c.at("source_post_ids"))
                if (auto it = posts.find(id.get<std::string>()); it != posts.end()) cited.push_back(it->second);
            c["source_posts"] = std::move(cited);
            const auto term = c.at("term").get<std::string>();
            if (auto it = active.find(term); it != active.end())
                c["human_verdict"] = verdict_to_json(it->second);
            else
                c["human_verdict"] = nullptr;
            out.push_back(std::move(c));
        }
        return reply(200, json{{"run_id", raw.at("run_id")}, {"candidates", out}});
    }

    HttpReply post_verdict(const std::string& run_id, const std::string& dir, const std::string& body) {
        json j;
        try {
            j = json::parse(body);
        } catch (const json::parse_error&) {
            return error_reply(422, "request body is not valid JSON");
        }
        if (!j.is_object()) return error_reply(422, "request body must be an object");
        auto str = [&](const char* key) -> std::optional<std::string> {
            auto it = j.find(key);
            if (it == j.end() || it->is_null()) return std::nullopt;
            if (!it->is_string()) throw InvalidArgument(std::string("field \"") + key + "\" must be a string");
            return it->get<std::string>();
        };
        HumanVerdict v;
        std::optional<std::string> revision;
        try {
            auto term = str("term");
            auto label = str("label");
            auto reviewer = str("reviewer");
            if (!term || term->empty()) return error_reply(422, "field \"term\" is required");
            if (!label) return error_reply(422, "field \"label\" is required");
            if (!reviewer || reviewer->empty()) return error_reply(422, "field \"reviewer\" is required");
            auto parsed = parse_review_label(*label);
            if (!parsed)
                return error_reply(422, "label must be one of antisemitic, neutral_in_antisemitic_context, "
                                        "not_antisemitic");
            v.term = *term;
            v.label = *parsed;
            v.reviewer = *reviewer;
            v.note = str("note").value_or("");
            revision = str("revision");
        } catch (const InvalidArgument& e) {
            return error_reply(422, e.what());
        }
        v.run_id = run_id;

        std::lock_guard g(lock_for(run_id));
        const auto report = load_report(dir + "/report.json");
        if (!report.find(v.term)) return error_reply(404, "term \"" + v.term + "\" is not a candidate of " + run_id);
        try {
            auto stored = VerdictStore(dir).record(std::move(v), revision);
            sync_human_verdicts(dir);
            return reply(200, verdict_to_json(stored));
        } catch (const ConflictError& e) {
            return reply(409, json{{"error", e.what()}, {"current_revision", e.current_revision()}});
        }
    }

    HttpReply promote(const std::string& run_id, const std::string& dir, const std::string& body) {
        std::optional<std::vector<std::string>> terms;
        if (!text::trim(body).empty()) {
            json j;
            try {
                j = json::parse(body);
            } catch (const json::parse_error&) {
                return error_reply(422, "request body is not valid JSON");
            }
            if (!j.is_object()) return error_reply(422, "request body must be an object");
            if (auto it = j.find("terms"); it != j.end() && !it->is_null()) {
                if (!it->is_array()) return error_reply(422, "field \"terms\" must be an array of strings");
                terms.emplace();
                for (const auto& t : *it) {
                    if (!t.is_string()) return error_reply(422, "field \"terms\" must be an array of strings");
                    terms->push_back(t.get<std::string>());
                }
            }
        }
        std::lock_guard g(lock_for(run_id));
        const auto report = load_report(dir + "/report.json");
        const auto active = VerdictStore(dir).active();
        const auto accepted = terms ? *terms : antisemitic_verdict_terms(active);
        try {
            auto result = promote_terms(report, active, accepted);
            return reply(200, json{{"promoted", result.promoted}, {"already_known", result.already_known}});
        } catch (const InvalidArgument& e) {
            return error_reply(422, e.what());
        }
    }

    HttpReply route(const std::string& method, const std::string& path, const std::string& body) {
        static const std::regex run_re(R"(^/api/runs/([^/]+)/(candidates|verdicts|promote)/?$)");
        if (path == "/api/runs" || path == "/api/runs/") {
            if (method != "GET") return error_reply(405, "method not allowed");
            return list_runs();
        }
        std::smatch m;
        if (!std::regex_match(path, m, run_re)) return error_reply(404, "no route for " + path);
        const std::string id = m[1], action = m[2];
        const std::string expected = action == "candidates" ? "GET" : "POST";
        if (method != expected) return error_reply(405, "method not allowed");
        const auto dir = run_dir(id);
        if (!dir) return error_reply(404, "unknown run \"" + id + "\"");
        if (action == "candidates") return candidates(*dir);
        if (action == "verdicts") return post_verdict(id, *dir, body);
        return promote(id, *dir, body);
    }
};

ReviewService::ReviewService(ReviewServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        auto r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    auto& s = impl_->server;
    s.Get(R"(/.*)", handler);
    s.Post(R"(/.*)", handler);
    s.Put(R"(/.*)", handler);
    s.Delete(R"(/.*)", handler);
    s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    s.set_default_headers({{"Access-Control-Allow-Origin", impl_->options.cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
}

ReviewService::~ReviewService() { stop(); }

HttpReply ReviewService::handle(const std::string& method, const std::string& path, const std::string& body) const {
    try {
        return impl_->route(method, path, body);
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

bool ReviewService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ReviewService::start_background(const std::string& host) {
    const int port = impl_->server.bind_to_any_port(host);
    if (port <= 0) throw TransportError("cannot bind " + host);
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void ReviewService::stop() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace trendlex
