#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cdm {

/// Flat `key = value` text. `#` starts a comment, blank lines are skipped,
/// keys are lower-cased with `_` folded to `-` so they match long flag names.
/// Later duplicates override earlier ones.
std::vector<std::pair<std::string, std::string>> read_kv_file(const std::filesystem::path& path);

}  // namespace cdm
