#include "cdm/kvfile.hpp"

#include "cdm/core.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace cdm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_kv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config: " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(path.string() + ":" + std::to_string(lineno) + ": empty key");
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
            return c == '_' ? '-' : static_cast<char>(std::tolower(c));
        });
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& kv) { return kv.first == key; });
        if (it != out.end()) it->second = value;
        else out.emplace_back(key, value);
    }
    return out;
}

}  // namespace cdm
