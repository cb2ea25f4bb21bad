#pragma once

// Record-file helpers shared by every module with an on-disk format.
// Diagnostics name the file, line, and field that failed.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vcp/error.hpp"

namespace vcp {

using Json = nlohmann::ordered_json;

struct Record {
    Json value;
    std::string where;  ///< "path:line" for diagnostics
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// One JSON object per non-blank line. Throws ValidationError on parse failure.
std::vector<Record> read_json_lines(const std::filesystem::path& path);
std::vector<Record> parse_json_lines(const std::string& text, const std::string& origin);

/// A single JSON document.
Json read_json_file(const std::filesystem::path& path);

std::string to_json_lines(const std::vector<Json>& records);

/// Typed field access; throws ValidationError("<where>: field 'key' ...").
const Json& require_field(const Json& obj, const std::string& key, const std::string& where);
std::string require_string(const Json& obj, const std::string& key, const std::string& where);
double require_number(const Json& obj, const std::string& key, const std::string& where);
long long require_integer(const Json& obj, const std::string& key, const std::string& where);
bool require_bool(const Json& obj, const std::string& key, const std::string& where);

/// Rejects keys outside `allowed`.
void reject_unknown_keys(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& where);

}  // namespace vcp
