#include "trendlex/corpus.hpp"

#include <json.hpp>
#include <sstream>

#include "trendlex/error.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

using nlohmann::json;

Corpus::Corpus(std::vector<Post> posts) : posts_(std::move(posts)) {
    for (std::size_t i = 0; i < posts_.size(); ++i) {
        by_id_.emplace(posts_[i].id, i);
        ++support_[text::lower(posts_[i].matched_seed)];
    }
}

const Post* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &posts_[it->second];
}

std::size_t Corpus::support(std::string_view seed) const {
    auto it = support_.find(text::lower(seed));
    return it == support_.end() ? 0 : it->second;
}

void SeedLexicon::add(std::string_view expression, std::string_view provenance) {
    auto expr = text::lower(text::trim(expression));
    if (expr.empty()) throw InvalidArgument("empty seed expression");
    if (contains(expr)) return;
    entries_.push_back({std::move(expr), std::string(provenance)});
}

bool SeedLexicon::contains(std::string_view expression) const {
    const auto expr = text::lower(text::trim(expression));
    for (const auto& e : entries_)
        if (e.expression == expr) return true;
    return false;
}

std::vector<std::string> SeedLexicon::expressions() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.expression);
    return out;
}

std::optional<Label> GoldStandard::label_of(std::string_view term) const {
    auto it = entries.find(term);
    if (it == entries.end()) return std::nullopt;
    return it->second.label;
}

std::size_t GoldStandard::positives() const {
    std::size_t n = 0;
    for (const auto& [_, e] : entries) n += e.label == Label::antisemitic;
    return n;
}

std::string_view to_string(Label label) {
    return label == Label::antisemitic ? "antisemitic" : "not_antisemitic";
}

std::optional<Label> parse_label(std::string_view token) {
    if (token == "antisemitic") return Label::antisemitic;
    if (token == "not_antisemitic") return Label::not_antisemitic;
    return std::nullopt;
}

Corpus parse_posts(std::string_view jsonl, const std::string& source_name) {
    std::vector<Post> posts;
    std::unordered_map<std::string, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= jsonl.size()) {
        auto end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        auto line = text::trim(jsonl.substr(pos, end - pos));
        ++line_no;
        pos = end + 1;
        if (line.empty()) {
            if (end == jsonl.size()) break;
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source_name, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(source_name, line_no, "expected a JSON object");
        Post p;
        auto field = [&](const char* name, std::string& dst, bool required_non_empty) {
            auto it = obj.find(name);
            if (it == obj.end() || !it->is_string())
                throw ParseError(source_name, line_no, std::string("missing string field \"") + name + "\"");
            dst = it->get<std::string>();
            if (required_non_empty && dst.empty())
                throw ParseError(source_name, line_no, std::string("empty field \"") + name + "\"");
        };
        field("id", p.id, true);
        field("platform", p.platform, false);
        field("timestamp", p.timestamp, false);
        field("text", p.text, true);
        field("matched_seed", p.matched_seed, true);
        p.matched_seed = text::lower(text::trim(p.matched_seed));
        if (auto [it, inserted] = first_line.emplace(p.id, line_no); !inserted) {
            throw ParseError(source_name, line_no,
                             "duplicate id \"" + p.id + "\" (lines " + std::to_string(it->second) +
                                 " and " + std::to_string(line_no) + ")");
        }
        posts.push_back(std::move(p));
        if (end == jsonl.size()) break;
    }
    return Corpus(std::move(posts));
}

Corpus load_posts(const std::string& path) { return parse_posts(text::read_file(path), path); }

SeedLexicon parse_seeds(std::string_view content) {
    SeedLexicon seeds;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string_view provenance = "initial";
        std::string expr = line;
        if (auto tab = line.find('\t'); tab != std::string::npos) {
            expr = line.substr(0, tab);
            auto prov = text::trim(std::string_view(line).substr(tab + 1));
            if (!prov.empty()) provenance = prov;
        }
        if (text::trim(expr).empty()) continue;
        seeds.add(expr, provenance);
    }
    return seeds;
}

SeedLexicon load_seeds(const std::string& path) { return parse_seeds(text::read_file(path)); }

std::string render_seeds(const SeedLexicon& seeds) {
    std::string out;
    for (const auto& e : seeds.entries()) {
        out += e.expression;
        if (e.provenance != "initial") out += "\t" + e.provenance;
        out += "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::string(text::trim(cur)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::string(text::trim(cur)));
    return out;
}

}  // namespace

GoldStandard parse_gold(std::string_view csv, const std::string& source_name) {
    GoldStandard gold;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        auto cols = split_csv(line);
        if (!header_seen) {
            if (cols.size() < 3 || cols[0] != "term" || cols[1] != "label" || cols[2] != "provenance")
                throw ParseError(source_name, row, "expected header term,label,provenance");
            header_seen = true;
            continue;
        }
        if (cols.size() != 3) throw ParseError(source_name, row, "expected 3 columns");
        auto label = parse_label(cols[1]);
        if (!label) throw ParseError(source_name, row, "unknown label \"" + cols[1] + "\"");
        GoldProvenance prov;
        if (cols[2] == "known_glossary") prov = GoldProvenance::known_glossary;
        else if (cols[2] == "manual_search") prov = GoldProvenance::manual_search;
        else throw ParseError(source_name, row, "unknown provenance \"" + cols[2] + "\"");
        auto term = text::lower(cols[0]);
        if (term.empty()) throw ParseError(source_name, row, "empty term");
        if (!gold.entries.emplace(term, GoldEntry{*label, prov}).second)
            throw ParseError(source_name, row, "duplicate term \"" + term + "\"");
    }
    if (!header_seen) throw ParseError(source_name, 0, "missing header term,label,provenance");
    return gold;
}

GoldStandard load_gold(const std::string& path) { return parse_gold(text::read_file(path), path); }

void validate_corpus(const Corpus& corpus, const SeedLexicon& seeds) {
    for (const auto& p : corpus.posts()) {
        if (!seeds.contains(p.matched_seed))
            throw InvalidArgument("post " + p.id + ": matched_seed \"" + p.matched_seed +
                                  "\" is not in the seed lexicon");
    }
}

SeedLexicon filter_seeds_by_support(const Corpus& corpus, const SeedLexicon& seeds,
                                    std::size_t min_posts) {
    if (min_posts < 1) throw InvalidArgument("min_posts must be >= 1");
    SeedLexicon out;
    for (const auto& e : seeds.entries())
        if (corpus.support(e.expression) >= min_posts) out.add(e.expression, e.provenance);
    return out;
}

}  // namespace trendlex
