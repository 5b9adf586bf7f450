#pragma once

// Internal helpers shared by the ingestion paths: whole-file reads and
// RFC-4180-style CSV parsing (quoted fields, "" escapes, embedded newlines).

#include <filesystem>
#include <string>
#include <vector>

namespace provbench::detail {

std::string slurp(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

} // namespace provbench::detail
