#include "trendlex/verdicts.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "trendlex/pipeline.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

using nlohmann::json;

std::string_view to_string(ReviewLabel label) {
    switch (label) {
        case ReviewLabel::antisemitic: return "antisemitic";
        case ReviewLabel::neutral_in_antisemitic_context: return "neutral_in_antisemitic_context";
        case ReviewLabel::not_antisemitic: return "not_antisemitic";
    }
    return "not_antisemitic";
}

std::optional<ReviewLabel> parse_review_label(std::string_view s) {
    if (s == "antisemitic") return ReviewLabel::antisemitic;
    if (s == "neutral_in_antisemitic_context") return ReviewLabel::neutral_in_antisemitic_context;
    if (s == "not_antisemitic") return ReviewLabel::not_antisemitic;
    return std::nullopt;
}

namespace {

std::mutex& lock_for(const std::string& path) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<std::mutex>> registry;
    std::lock_guard lock(registry_mutex);
    auto& slot = registry[path];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

json to_json(const HumanVerdict& v) {
    return json{{"term", v.term},         {"run_id", v.run_id},         {"label", to_string(v.label)},
                {"reviewer", v.reviewer}, {"note", v.note},             {"decided_at", v.decided_at},
                {"revision", v.revision}, {"supersedes", v.supersedes}};
}

HumanVerdict from_json(const json& j) {
    HumanVerdict v;
    v.term = j.at("term").get<std::string>();
    v.run_id = j.at("run_id").get<std::string>();
    auto label = parse_review_label(j.at("label").get<std::string>());
    if (!label) throw Error("unknown verdict label " + j.at("label").get<std::string>());
    v.label = *label;
    v.reviewer = j.value("reviewer", "");
    v.note = j.value("note", "");
    v.decided_at = j.value("decided_at", "");
    v.revision = j.at("revision").get<std::string>();
    v.supersedes = j.value("supersedes", "");
    return v;
}

std::vector<HumanVerdict> read_history(const std::string& path) {
    std::vector<HumanVerdict> out;
    if (!std::filesystem::exists(path)) return out;
    std::istringstream in(text::read_file(path));
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError(path, no, e.what());
        }
    }
    return out;
}

}  // namespace

VerdictStore::VerdictStore(std::string run_dir) : run_dir_(std::move(run_dir)), path_(run_dir_ + "/verdicts.jsonl") {}

std::vector<HumanVerdict> VerdictStore::history() const {
    std::lock_guard lock(lock_for(path_));
    return read_history(path_);
}

std::map<std::string, HumanVerdict> VerdictStore::active() const {
    std::map<std::string, HumanVerdict> out;
    for (auto& v : history()) out.insert_or_assign(v.term, std::move(v));
    return out;
}

HumanVerdict VerdictStore::record(HumanVerdict verdict, const std::optional<std::string>& expected_revision) {
    std::lock_guard lock(lock_for(path_));
    const auto hist = read_history(path_);
    const HumanVerdict* current = nullptr;
    for (const auto& v : hist)
        if (v.term == verdict.term) current = &v;

    if (current) {
        if (!expected_revision || *expected_revision != current->revision)
            throw ConflictError("verdict for \"" + verdict.term + "\" exists at revision " + current->revision +
                                    "; resubmit with that revision to replace it",
                                current->revision);
        verdict.supersedes = current->revision;
    } else if (expected_revision && !expected_revision->empty()) {
        throw ConflictError("no verdict for \"" + verdict.term + "\" matches revision " + *expected_revision, "");
    }
    if (verdict.decided_at.empty()) verdict.decided_at = utc_timestamp();
    const auto seq = hist.size() + 1;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016zx",
                  std::hash<std::string>{}(verdict.run_id + "\n" + verdict.term + "\n" + std::to_string(seq) + "\n" +
                                           verdict.decided_at + "\n" + std::string(to_string(verdict.label))));
    verdict.revision = std::to_string(seq) + "-" + std::string(hex).substr(0, 8);

    std::filesystem::create_directories(run_dir_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to " + path_);
    out << to_json(verdict).dump() << '\n';
    out.flush();
    if (!out) throw Error("short write to " + path_);
    return verdict;
}

// Shared with the report serializer.
json verdict_to_json(const HumanVerdict& v) { return to_json(v); }
HumanVerdict verdict_from_json(const json& j) { return from_json(j); }

}  // namespace trendlex
