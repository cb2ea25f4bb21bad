#include "vcp/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace vcp {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path.string() + ": cannot write file");
    out << text;
}

std::vector<Record> parse_json_lines(const std::string& text, const std::string& origin) {
    std::vector<Record> out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
            continue;
        const std::string where = origin + ":" + std::to_string(number);
        Json value;
        try {
            value = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(where + ": malformed record: " + e.what());
        }
        if (!value.is_object()) throw ValidationError(where + ": record is not an object");
        out.push_back({std::move(value), where});
    }
    return out;
}

std::vector<Record> read_json_lines(const std::filesystem::path& path) {
    return parse_json_lines(read_text_file(path), path.string());
}

Json read_json_file(const std::filesystem::path& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": malformed document: " + e.what());
    }
}

std::string to_json_lines(const std::vector<Json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

const Json& require_field(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ValidationError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

std::string require_string(const Json& obj, const std::string& key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_string()) throw ValidationError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const Json& obj, const std::string& key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_number()) throw ValidationError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

long long require_integer(const Json& obj, const std::string& key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_number_integer())
        throw ValidationError(where + ": field '" + key + "' must be an integer");
    return v.get<long long>();
}

bool require_bool(const Json& obj, const std::string& key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_boolean()) throw ValidationError(where + ": field '" + key + "' must be a boolean");
    return v.get<bool>();
}

void reject_unknown_keys(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(where + ": unknown key '" + key + "'");
}

}  // namespace vcp
