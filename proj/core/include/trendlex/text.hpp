#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trendlex::text {

/// ASCII lowercase; bytes >= 0x80 pass through unchanged.
std::string lower(std::string_view s);

std::string_view trim(std::string_view s);

std::vector<std::string> split_words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

/// Reads a list file: one entry per line, '#' starts a comment, blank lines skipped.
std::vector<std::string> read_list_file(const std::string& path);

std::string read_file(const std::string& path);

/// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace trendlex::text
