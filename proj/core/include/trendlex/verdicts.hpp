#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trendlex/error.hpp"

namespace trendlex {

enum class ReviewLabel { antisemitic, neutral_in_antisemitic_context, not_antisemitic };

std::string_view to_string(ReviewLabel label);
std::optional<ReviewLabel> parse_review_label(std::string_view s);

struct HumanVerdict {
    std::string term;
    std::string run_id;
    ReviewLabel label = ReviewLabel::not_antisemitic;
    std::string reviewer;
    std::string note;
    std::string decided_at;
    std::string revision;  // token required to supersede this verdict
    std::string supersedes;  // revision it replaced, empty for the first one

    bool operator==(const HumanVerdict&) const = default;
};

/// A verdict write lost the optimistic revision check.
class ConflictError : public Error {
public:
    ConflictError(const std::string& what, std::string current_revision)
        : Error(what), current_(std::move(current_revision)) {}
    const std::string& current_revision() const noexcept { return current_; }

private:
    std::string current_;
};

/// verdicts.jsonl inside a run directory. Writes for one file are
/// serialized in-process; the last line per term is the active verdict.
class VerdictStore {
public:
    explicit VerdictStore(std::string run_dir);

    std::vector<HumanVerdict> history() const;
    std::map<std::string, HumanVerdict> active() const;

    /// Records a verdict. A term that already has one needs its current
    /// revision in `expected_revision`, otherwise ConflictError.
    HumanVerdict record(HumanVerdict verdict, const std::optional<std::string>& expected_revision);

    const std::string& path() const noexcept { return path_; }

private:
    std::string run_dir_;
    std::string path_;
};

}  // namespace trendlex
