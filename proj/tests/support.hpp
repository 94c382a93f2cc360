#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "trendlex/preprocess.hpp"
#include "trendlex/text.hpp"

#define CHECK_NEAR(a, b, tol) CHECK_LE(std::abs((a) - (b)), (tol))
#define REQUIRE_NEAR(a, b, tol) REQUIRE_LE(std::abs((a) - (b)), (tol))
#define CHECK_DOUBLE_EQ(a, b) CHECK_MESSAGE(::trendlex::testing::double_eq((a), (b)), (a) << " vs " << (b))
#define REQUIRE_DOUBLE_EQ(a, b) REQUIRE_MESSAGE(::trendlex::testing::double_eq((a), (b)), (a) << " vs " << (b))

namespace trendlex::testing {

/// Equal within four units in the last place.
inline bool double_eq(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return false;
    auto biased = [](double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        constexpr std::uint64_t sign = std::uint64_t{1} << 63;
        return bits & sign ? ~bits + 1 : bits | sign;
    };
    const auto x = biased(a), y = biased(b);
    return (x > y ? x - y : y - x) <= 4;
}

inline std::string data_dir() { return TRENDLEX_TEST_DATA_DIR; }
inline std::string fixture(const std::string& name) { return std::string(TRENDLEX_TEST_FIXTURES) + "/" + name; }

inline const LanguageResources& resources() {
    static const LanguageResources res = LanguageResources::load(data_dir());
    return res;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string pattern = (std::filesystem::temp_directory_path() / "trendlex-XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& content) const {
        auto p = file(name);
        text::write_file_atomic(p, content);
        return p;
    }

private:
    std::filesystem::path path_;
};

/// Copies the full-scale fixture (posts, seeds, known terms, gold) into `dir`.
inline void copy_full_scale(const TempDir& dir) {
    for (const char* f : {"posts.jsonl", "seeds.txt", "known_terms.txt", "gold.csv"})
        std::filesystem::copy_file(fixture(std::string("full_scale/") + f), dir.file(f));
}

}  // namespace trendlex::testing
