#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace auction::cli {

/// Fully resolved run parameters, key -> text value. Ordered so that echoes
/// into manifests are stable.
using ParamMap = std::map<std::string, std::string>;

struct ParamSpec {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

/// The simulation subcommands and analyze. Throws ConfigError otherwise.
const std::vector<ParamSpec>& param_specs(std::string_view command);
bool is_command(std::string_view command);

ParamMap defaults(std::string_view command);

/// Parameter overrides of a named preset. Throws ConfigError for unknown
/// names.
const ParamMap& preset(std::string_view command, std::string_view name);
std::vector<std::string> preset_names(std::string_view command);

/// Copies `source` over `target`, rejecting keys the command does not know.
void apply(ParamMap& target, const ParamMap& source, std::string_view command,
           std::string_view origin);

/// Flat `key = value` text with `[section]` headers; `#` and `;` start
/// comments. Keys before the first header land in section "".
struct IniFile {
  std::map<std::string, ParamMap> sections;

  const ParamMap* section(std::string_view name) const;
};

IniFile parse_ini(std::istream& in, std::string_view origin = "config");
IniFile load_ini(const std::filesystem::path& path);

// Typed accessors; malformed values throw ConfigError naming the key.
std::string get_string(const ParamMap& params, std::string_view key);
double get_double(const ParamMap& params, std::string_view key);
std::size_t get_size(const ParamMap& params, std::string_view key);
std::uint64_t get_u64(const ParamMap& params, std::string_view key);
bool get_bool(const ParamMap& params, std::string_view key);

/// Comma-separated list, whitespace trimmed, empty items rejected.
std::vector<std::string> split_list(std::string_view text);

}  // namespace auction::cli
