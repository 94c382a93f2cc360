#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trendlex {

struct Post {
    std::string id;
    std::string platform;
    std::string timestamp;  // ISO-8601, carried through for reviewers
    std::string text;
    std::string matched_seed;

    bool operator==(const Post&) const = default;
};

/// Posts in file order with an id index. Immutable once loaded.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Post> posts);

    const std::vector<Post>& posts() const noexcept { return posts_; }
    std::size_t size() const noexcept { return posts_.size(); }
    bool empty() const noexcept { return posts_.empty(); }
    const Post& operator[](std::size_t i) const { return posts_[i]; }

    const Post* find(std::string_view id) const;

    /// Number of posts whose matched_seed equals `seed` (lowercased compare).
    std::size_t support(std::string_view seed) const;

private:
    std::vector<Post> posts_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::map<std::string, std::size_t, std::less<>> support_;
};

struct SeedEntry {
    std::string expression;  // lowercase
    std::string provenance;  // "initial" or "promoted:<run_id>"

    bool operator==(const SeedEntry&) const = default;
};

/// Ordered, deduplicated list of lowercase seed expressions.
class SeedLexicon {
public:
    SeedLexicon() = default;

    /// Throws InvalidArgument on an empty expression; duplicates are ignored.
    void add(std::string_view expression, std::string_view provenance = "initial");

    bool contains(std::string_view expression) const;
    const std::vector<SeedEntry>& entries() const noexcept { return entries_; }
    std::vector<std::string> expressions() const;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    bool operator==(const SeedLexicon& other) const { return entries_ == other.entries_; }

private:
    std::vector<SeedEntry> entries_;
};

/// Binary label used by the gold standard and by the final vote.
enum class Label { antisemitic, not_antisemitic };
enum class GoldProvenance { known_glossary, manual_search };

struct GoldEntry {
    Label label;
    GoldProvenance provenance;
};

struct GoldStandard {
    std::map<std::string, GoldEntry, std::less<>> entries;

    std::optional<Label> label_of(std::string_view term) const;
    std::size_t positives() const;
};

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view token);

/// JSON-lines post file. Throws ParseError naming the line on malformed
/// input, and naming both lines on a duplicate id.
Corpus load_posts(const std::string& path);
Corpus parse_posts(std::string_view jsonl, const std::string& source_name = "<memory>");

/// seeds.txt: one expression per line, optional TAB + provenance column.
SeedLexicon load_seeds(const std::string& path);
SeedLexicon parse_seeds(std::string_view content);
std::string render_seeds(const SeedLexicon& seeds);

/// gold.csv with header term,label,provenance.
GoldStandard load_gold(const std::string& path);
GoldStandard parse_gold(std::string_view csv, const std::string& source_name = "<memory>");

/// Throws InvalidArgument if any post's matched_seed is not in `seeds`.
void validate_corpus(const Corpus& corpus, const SeedLexicon& seeds);

/// Seeds with at least `min_posts` supporting posts, order preserved.
SeedLexicon filter_seeds_by_support(const Corpus& corpus, const SeedLexicon& seeds,
                                    std::size_t min_posts);

}  // namespace trendlex
