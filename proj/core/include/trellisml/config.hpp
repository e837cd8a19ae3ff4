#pragma once

#include <map>
#include <string>
#include <vector>

#include "trellisml/errors.hpp"

namespace trellisml {

// Line-oriented "key = value" files with [section] headers and '#' comments.
// Keys are reported as "section.key"; keys before any header keep their bare
// name. Diagnostics name the offending key and line.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

double config_double(const ConfigMap& cfg, const std::string& key, double fallback);
int config_int(const ConfigMap& cfg, const std::string& key, int fallback);
uint64_t config_u64(const ConfigMap& cfg, const std::string& key, uint64_t fallback);
std::string config_str(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback);
bool config_has(const ConfigMap& cfg, const std::string& key);

// Comma-separated lists; an empty string yields an empty vector.
std::vector<double> parse_double_list(const std::string& key, const std::string& text);
std::vector<int> parse_int_list(const std::string& key, const std::string& text);
std::vector<uint32_t> parse_u32_list(const std::string& key, const std::string& text);

}  // namespace trellisml
