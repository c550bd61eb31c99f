#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace testpaths {

inline std::filesystem::path data(const std::string& rel) { return std::filesystem::path(AIDE_TEST_DATA_DIR) / rel; }
inline std::filesystem::path schema(const std::string& name) {
    return std::filesystem::path(AIDE_TEST_SCHEMA_DIR) / name;
}
inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(AIDE_TEST_FIXTURE_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace testpaths
