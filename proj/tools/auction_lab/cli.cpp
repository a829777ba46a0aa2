#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "auction/error.hpp"
#include "runner.hpp"

namespace auction::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string out;
  std::string config;
  std::string preset;
  std::string manifest;
  std::size_t jobs = 0;
  bool list_presets = false;
};

fs::path output_dir(const std::string& flag, const std::string& command) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("AUCTION_LAB_OUT");
  const fs::path base = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("auction-lab-out");
  return base / command;
}

std::size_t worker_count(std::size_t flag) {
  if (flag != 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

Json load_manifest(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path);
  Json m = Json::parse(in, nullptr, false);
  if (m.is_discarded() || !m.is_object()) throw ConfigError("manifest " + path + " is not valid JSON");
  if (m.value("tool", "") != kToolName) throw ConfigError("manifest " + path + " was not written by " + kToolName);
  if (m.value("subcommand", "") != command) {
    throw ConfigError("manifest " + path + " is for '" + m.value("subcommand", "") + "', not '" + command + "'");
  }
  return m;
}

ParamMap config_map(const Json& object, const std::string& what) {
  if (!object.is_object()) throw ConfigError(what + ": expected an object of parameters");
  ParamMap out;
  for (const auto& [k, v] : object.items()) {
    if (!v.is_string()) throw ConfigError(what + ": parameter '" + k + "' is not a string");
    out[k] = v.get<std::string>();
  }
  return out;
}

std::string csv_value(const Json& v) {
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_null()) return "nan";
  return v.dump();
}

const std::vector<std::string> kAggregateColumns = {
    "trials", "rho_hat", "C1", "stderr_C1", "R1", "stderr_R1", "slope", "r_squared", "nonlinearity",
    "nonlinearity_median"};

int run_single(const std::string& command, const Common& common, const ParamMap& flags,
               std::ostream& out, std::ostream& err) {
  if (common.list_presets) {
    for (const auto& name : preset_names(command)) out << name << '\n';
    return 0;
  }
  CellRequest req;
  req.command = command;
  req.params = defaults(command);
  if (!common.manifest.empty()) {
    const Json m = load_manifest(common.manifest, command);
    apply(req.params, config_map(m.at("config"), common.manifest), command, common.manifest);
    req.cell = m.value("cell", std::uint64_t{0});
  } else {
    ParamMap section;
    std::string file_preset;
    if (!common.config.empty()) {
      const auto ini = load_ini(common.config);
      if (const ParamMap* s = ini.section(command)) section = *s;
      if (const auto it = section.find("preset"); it != section.end()) {
        file_preset = it->second;
        section.erase(it);
      }
    }
    const std::string& name = common.preset.empty() ? file_preset : common.preset;
    if (!name.empty()) apply(req.params, preset(command, name), command, "preset " + name);
    apply(req.params, section, command, common.config);
  }
  apply(req.params, flags, command, "command line");
  req.dir = output_dir(common.out, command);

  const auto outcomes = run_cells({req}, worker_count(common.jobs), err);
  const auto& o = outcomes.front();
  if (o.code != 0) {
    err << kToolName << ' ' << command << ": " << o.error << '\n';
    return o.code;
  }
  const Json& s = o.summary.contains("aggregate") ? o.summary["aggregate"] : o.summary;
  out << s.dump(2) << '\n';
  return 0;
}

int run_sweep(const Common& common, const std::string& positional, std::ostream& out,
              std::ostream& err) {
  std::string command;
  std::vector<std::string> grid_keys;
  std::vector<ParamMap> cells;
  if (!common.manifest.empty()) {
    const Json m = load_manifest(common.manifest, "sweep");
    command = m.at("command").get<std::string>();
    grid_keys = m.at("grid_keys").get<std::vector<std::string>>();
    for (const auto& c : m.at("cells")) {
      ParamMap params = defaults(command);
      apply(params, config_map(c.at("params"), common.manifest), command, common.manifest);
      cells.push_back(std::move(params));
    }
  } else {
    const std::string& path = common.config.empty() ? positional : common.config;
    if (path.empty()) throw ConfigError("sweep: no config file given");
    auto plan = plan_sweep(load_ini(path));
    command = plan.command;
    grid_keys = plan.grid_keys;
    cells = std::move(plan.cells);
  }

  const fs::path dir = output_dir(common.out, "sweep");
  std::vector<CellRequest> requests;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    requests.push_back({command, cells[c], c, dir / ("cell_" + std::to_string(c))});
  }
  fs::create_directories(dir);
  const auto outcomes = run_cells(requests, worker_count(common.jobs), err);

  std::string table = "cell,dir";
  for (const auto& k : grid_keys) table += ',' + k;
  table += ",status";
  for (const auto& k : kAggregateColumns) table += ',' + k;
  table += ",drop_z\n";
  std::string failures;
  int code = 0;
  Json manifest_cells = Json::array();
  std::vector<std::string> outputs;
  for (std::size_t c = 0; c < requests.size(); ++c) {
    const auto& o = outcomes[c];
    const std::string sub = "cell_" + std::to_string(c);
    table += std::to_string(c) + ',' + sub;
    for (const auto& k : grid_keys) table += ',' + cells[c].at(k);
    table += o.code == 0 ? ",ok" : ",failed";
    const Json empty = Json::object();
    const Json& agg = o.code == 0 ? o.summary.at("aggregate") : empty;
    for (const auto& k : kAggregateColumns) table += ',' + (agg.contains(k) ? csv_value(agg.at(k)) : "nan");
    const Json drop = agg.contains("response_drop") ? agg.at("response_drop") : Json();
    table += ',' + (drop.is_object() ? csv_value(drop.at("z")) : "nan") + '\n';
    if (o.code != 0) {
      failures += sub + ": " + o.error + '\n';
      if (code == 0) code = o.code;
    }
    Json params = Json::object();
    for (const auto& [k, v] : cells[c]) params[k] = v;
    manifest_cells.push_back({{"cell", c}, {"dir", sub}, {"status", o.code == 0 ? "ok" : "failed"}, {"params", params}});
    if (fs::exists(dir / sub / "manifest.json")) outputs.push_back(sub + "/manifest.json");
  }
  write_output(dir, "aggregate.csv", table, outputs);
  if (!failures.empty()) write_output(dir, "failures.txt", failures, outputs);

  Json m = Json::object();
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["subcommand"] = "sweep";
  m["command"] = command;
  m["grid_keys"] = grid_keys;
  m["seed_scheme"] = "trial_seed(master, cell, trial)";
  m["cells"] = manifest_cells;
  m["outputs"] = outputs;
  std::ofstream mf(dir / "sweep_manifest.json", std::ios::binary);
  mf << m.dump(2) << '\n';
  if (!mf) throw std::runtime_error("cannot write sweep manifest");

  out << requests.size() - std::count_if(outcomes.begin(), outcomes.end(), [](const CellOutcome& o) { return o.code != 0; })
      << " of " << requests.size() << " cells succeeded -> " << dir.string() << '\n';
  if (!failures.empty()) err << "failed cells:\n" << failures;
  return code;
}

void add_common(CLI::App* sub, Common& common, bool with_preset) {
  sub->add_option("--out,-o", common.out, "output directory (default $AUCTION_LAB_OUT/<command>)");
  sub->add_option("--config,-c", common.config, "config file with [section] per subcommand");
  sub->add_option("--manifest", common.manifest, "rerun the configuration recorded in a manifest");
  sub->add_option("--jobs,-j", common.jobs, "worker threads (default: all cores)");
  if (with_preset) {
    sub->add_option("--preset", common.preset, "named parameter set");
    sub->add_flag("--list-presets", common.list_presets, "print the preset names and exit");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lag statistics of double-auction markets: quote-file analysis and model simulations",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> gamma;
  std::string input;
  std::string sweep_file;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "statistics of a quote file"},
      {"mrr", "Markov-sign price process with a constant spread"},
      {"mg", "minority-game double auction"},
      {"vs", "mean-field market with moving-average participation"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    for (const auto& spec : param_specs(name)) {
      std::string flag = "--" + std::string(spec.key);
      if (spec.key == "adapt") flag += ",--adapt-mode";
      options[name][std::string(spec.key)] =
          sub->add_option(flag, values[name][std::string(spec.key)], std::string(spec.help) +
                                                                       " [" + std::string(spec.default_value) + "]");
    }
    if (name == "mg" || name == "vs") {
      options[name]["gamma"] = sub->add_option("--gamma", gamma[name], "sets gamma_a and gamma_b");
    }
    if (name == "analyze") sub->add_option("input_file", input, "quote file");
    add_common(sub, common, name != "analyze");
  }
  CLI::App* sweep = app.add_subcommand("sweep", "grid of simulation runs from a config file");
  sweep->add_option("config_file", sweep_file, "config file with a [sweep] section");
  add_common(sweep, common, false);

  std::vector<const char*> argv{kToolName};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return run_sweep(common, sweep_file, out, err);
    for (const auto& [name, _] : commands) {
      CLI::App* sub = app.get_subcommand(name);
      if (!sub->parsed()) continue;
      ParamMap flags;
      if (options[name].count("gamma") != 0 && options[name]["gamma"]->count() > 0) {
        flags["gamma_a"] = flags["gamma_b"] = gamma[name];
      }
      for (const auto& [key, opt] : options[name]) {
        if (key != "gamma" && opt->count() > 0) flags[key] = values[name][key];
      }
      if (name == "analyze" && !input.empty()) flags["input"] = input;
      return run_single(name, common, flags, out, err);
    }
  } catch (const std::exception& e) {
    err << kToolName << ": " << e.what() << '\n';
    return exit_code(std::current_exception());
  }
  return 1;
}

}  // namespace auction::cli
