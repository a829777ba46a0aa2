#include "params.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "auction/error.hpp"

namespace auction::cli {
namespace {

const std::vector<ParamSpec> kMrr = {
    {"theta", "1.5", "price impact of a signed trade"},
    {"rho", "0.5", "persistence of the trade sign"},
    {"phi", "0", "transaction cost"},
    {"sigma", "1", "std of the public-information noise"},
    {"noise", "gaussian", "noise distribution: gaussian or uniform"},
    {"p0", "100", "initial price"},
    {"T", "100000", "rounds per trial"},
    {"trials", "10", "independent trials"},
    {"seed", "1", "master seed"},
    {"max_lag", "100", "largest lag of C(l) and R(l)"},
    {"vol_max_lag", "200", "largest lag of the volatility curve"},
    {"fit_first", "1", "first lag of the rho fit"},
    {"fit_last", "0", "last lag of the rho fit, 0 picks it from the data"},
    {"series", "first", "per-round series files: none, first or all"},
    {"ticks", "false", "also write trial quote files"},
};

const std::vector<ParamSpec> kMg = {
    {"N", "1025", "number of traders (odd)"},
    {"M", "9", "market history length"},
    {"beta", "0.01", "price step per unit of A"},
    {"psi", "0", "bias toward the previous sign"},
    {"zeta", "0", "weight of the fake history noise"},
    {"gamma_a", "0.01", "ask quote noise"},
    {"gamma_b", "0.01", "bid quote noise"},
    {"delta", "0.049", "half the quote offset"},
    {"p0", "100", "initial price"},
    {"T", "100010", "rounds per trial"},
    {"trials", "10", "independent trials"},
    {"seed", "1", "master seed"},
    {"adapt", "none", "look-up tables: none, latest or history"},
    {"f1", "0.01", "rewrite probability (latest mode)"},
    {"f2", "1", "restore probability"},
    {"alpha", "0.01", "rewrite scale (history mode)"},
    {"max_lag", "100", "largest lag of C(l) and R(l)"},
    {"fit_first", "1", "first lag of the rho fit"},
    {"fit_last", "0", "last lag of the rho fit, 0 picks it from the data"},
    {"bins", "50", "spread histogram bins"},
    {"series", "first", "per-round series files: none, first or all"},
    {"ticks", "false", "also write trial quote files"},
};

const std::vector<ParamSpec> kVs = {
    {"N", "20000", "number of agents"},
    {"mu", "100", "participation decay"},
    {"tau", "10000", "moving-average window"},
    {"gamma_a", "0.001", "ask quote noise"},
    {"gamma_b", "0.001", "bid quote noise"},
    {"delta", "0.02", "half the quote offset"},
    {"p0", "131.0725", "initial price"},
    {"T", "100000", "rounds per trial"},
    {"trials", "10", "independent trials"},
    {"seed", "1", "master seed"},
    {"max_lag", "100", "largest lag of C(l) and R(l)"},
    {"fit_first", "1", "first lag of the rho fit"},
    {"fit_last", "0", "last lag of the rho fit, 0 picks it from the data"},
    {"bins", "50", "spread histogram bins"},
    {"series", "first", "per-round series files: none, first or all"},
};

const std::vector<ParamSpec> kAnalyze = {
    {"input", "", "quote file (YYYY/MM/DD,HH:MM:SS,bid,ask)"},
    {"zero_policy", "carry-forward", "sign of a zero return: carry-forward, drop or plus-one"},
    {"max_lag", "100", "largest lag of C(l) and R(l)"},
    {"fit_first", "1", "first lag of the rho fit"},
    {"fit_last", "0", "last lag of the rho fit, 0 picks it from the data"},
    {"bins", "50", "histogram bins"},
    {"sbar", "", "spread threshold for waiting times, empty to skip"},
};

using PresetTable = std::map<std::string, ParamMap, std::less<>>;

const std::unordered_map<std::string_view, PresetTable>& presets() {
  static const std::unordered_map<std::string_view, PresetTable> table = {
      {"mrr",
       {
           {"fig7-a", {{"rho", "-0.9"}}},
           {"fig7-b", {{"rho", "-0.1"}}},
           {"fig7-c", {{"rho", "0.1"}}},
           {"fig7-d", {{"rho", "0.5"}}},
           {"fig8", {{"rho", "0.5"}}},
           {"fig9", {{"rho", "0.1"}}},
       }},
      {"mg",
       {
           {"fig8", {}},
           {"fig9", {}},
           {"fig10-psi005", {{"psi", "0.05"}}},
           {"fig10-psi01", {{"psi", "0.1"}}},
           {"fig11", {}},
           {"fig11-psi005", {{"psi", "0.05"}}},
           {"fig11-psi01", {{"psi", "0.1"}}},
           {"fig12-latest", {{"adapt", "latest"}, {"f1", "0.01"}, {"f2", "1"}}},
           {"fig12-latest-f2-09", {{"adapt", "latest"}, {"f1", "0.01"}, {"f2", "0.9"}}},
           {"fig13-history", {{"adapt", "history"}, {"alpha", "0.01"}, {"f2", "1"}}},
           {"fig13-history-f2-09", {{"adapt", "history"}, {"alpha", "0.01"}, {"f2", "0.9"}}},
       }},
      {"vs",
       {
           {"fig15", {{"mu", "100"}, {"tau", "10000"}, {"trials", "1"}}},
           {"fig16-a", {{"mu", "100"}, {"tau", "10000"}}},
           {"fig16-b", {{"mu", "10"}, {"tau", "10000"}}},
           {"fig16-c", {{"mu", "100"}, {"tau", "1000"}}},
       }},
      {"analyze", {}},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::string& lookup(const ParamMap& params, std::string_view key) {
  const auto it = params.find(std::string(key));
  if (it == params.end()) throw ConfigError("missing parameter '" + std::string(key) + "'");
  return it->second;
}

[[noreturn]] void bad_value(std::string_view key, const std::string& value, const char* kind) {
  throw ConfigError("parameter '" + std::string(key) + "': '" + value + "' is not " + kind);
}

template <typename T>
T parse_integer(std::string_view key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty()) bad_value(key, value, "a non-negative integer");
  return out;
}

}  // namespace

const std::vector<ParamSpec>& param_specs(std::string_view command) {
  if (command == "mrr") return kMrr;
  if (command == "mg") return kMg;
  if (command == "vs") return kVs;
  if (command == "analyze") return kAnalyze;
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

bool is_command(std::string_view command) {
  return command == "mrr" || command == "mg" || command == "vs" || command == "analyze";
}

ParamMap defaults(std::string_view command) {
  ParamMap out;
  for (const auto& spec : param_specs(command)) out[std::string(spec.key)] = spec.default_value;
  return out;
}

const ParamMap& preset(std::string_view command, std::string_view name) {
  const auto& table = presets().at(command);
  const auto it = table.find(name);
  if (it == table.end()) {
    throw ConfigError("unknown preset '" + std::string(name) + "' for " + std::string(command));
  }
  return it->second;
}

std::vector<std::string> preset_names(std::string_view command) {
  std::vector<std::string> out;
  for (const auto& [name, _] : presets().at(command)) out.push_back(name);
  return out;
}

void apply(ParamMap& target, const ParamMap& source, std::string_view command,
           std::string_view origin) {
  const auto& specs = param_specs(command);
  for (const auto& [key, value] : source) {
    const bool known = std::any_of(specs.begin(), specs.end(),
                                   [&](const ParamSpec& s) { return s.key == key; });
    if (!known) {
      throw ConfigError(std::string(origin) + ": unknown parameter '" + key + "' for " +
                        std::string(command));
    }
    target[key] = value;
  }
}

const ParamMap* IniFile::section(std::string_view name) const {
  const auto it = sections.find(std::string(name));
  return it == sections.end() ? nullptr : &it->second;
}

IniFile parse_ini(std::istream& in, std::string_view origin) {
  IniFile ini;
  std::string current;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto pos = line.find_first_of("#;"); pos != std::string_view::npos) {
      line = line.substr(0, pos);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no); };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + ": unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current.empty()) throw ConfigError(where() + ": empty section name");
      ini.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where() + ": empty key");
    auto& section = ini.sections[current];
    if (section.count(key) != 0) throw ConfigError(where() + ": duplicate key '" + key + "'");
    section[key] = std::string(trim(line.substr(eq + 1)));
  }
  return ini;
}

IniFile load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_ini(in, path.string());
}

std::string get_string(const ParamMap& params, std::string_view key) {
  return lookup(params, key);
}

double get_double(const ParamMap& params, std::string_view key) {
  const std::string& value = lookup(params, key);
  double out = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || value.empty()) bad_value(key, value, "a number");
  return out;
}

std::size_t get_size(const ParamMap& params, std::string_view key) {
  return parse_integer<std::size_t>(key, lookup(params, key));
}

std::uint64_t get_u64(const ParamMap& params, std::string_view key) {
  return parse_integer<std::uint64_t>(key, lookup(params, key));
}

bool get_bool(const ParamMap& params, std::string_view key) {
  const std::string& value = lookup(params, key);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) throw ConfigError("empty item in list '" + std::string(text) + "'");
    out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace auction::cli
