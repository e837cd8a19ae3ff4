#include "trellisml/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace trellisml {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_one_double(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || trim(end) != "") {
        throw config_error("key '" + key + "': '" + text + "' is not a number");
    }
    return v;
}

long long parse_one_int(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || trim(end) != "") {
        throw config_error("key '" + key + "': '" + text + "' is not an integer");
    }
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    std::stringstream ss(text);
    while (std::getline(ss, cur, ',')) parts.push_back(trim(cur));
    if (!parts.empty() && parts.back().empty()) parts.pop_back();
    return parts;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error("config line " + std::to_string(lineno) +
                                   ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("config line " + std::to_string(lineno) +
                               ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw config_error("config line " + std::to_string(lineno) + ": empty key");
        }
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

bool config_has(const ConfigMap& cfg, const std::string& key) { return cfg.count(key) > 0; }

double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : parse_one_double(key, it->second);
}

int config_int(const ConfigMap& cfg, const std::string& key, int fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : static_cast<int>(parse_one_int(key, it->second));
}

uint64_t config_u64(const ConfigMap& cfg, const std::string& key, uint64_t fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : static_cast<uint64_t>(parse_one_int(key, it->second));
}

std::string config_str(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split_list(text)) out.push_back(parse_one_double(key, p));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& p : split_list(text)) out.push_back(static_cast<int>(parse_one_int(key, p)));
    return out;
}

std::vector<uint32_t> parse_u32_list(const std::string& key, const std::string& text) {
    std::vector<uint32_t> out;
    for (const auto& p : split_list(text)) {
        const long long v = parse_one_int(key, p);
        if (v < 0) throw config_error("key '" + key + "': value must be nonnegative");
        out.push_back(static_cast<uint32_t>(v));
    }
    return out;
}

}  // namespace trellisml
