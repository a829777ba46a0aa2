#include "runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "auction/error.hpp"
#include "auction/random.hpp"

namespace auction::cli {

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int exit_code(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return 1;
  } catch (...) {
    return 2;
  }
}

namespace {

std::string message(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

void write_json(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

}  // namespace

Json make_manifest(const CellRequest& request, const std::vector<std::uint64_t>& trial_seeds,
                   const std::vector<std::string>& warnings, const std::vector<std::string>& outputs,
                   const std::string& error) {
  Json m = Json::object();
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["subcommand"] = request.command;
  m["cell"] = request.cell;
  Json config = Json::object();
  for (const auto& [k, v] : request.params) config[k] = v;
  m["config"] = config;
  if (request.params.count("seed") != 0) {
    m["master_seed"] = get_u64(request.params, "seed");
  } else {
    m["master_seed"] = nullptr;
  }
  m["seed_scheme"] = "trial_seed(master, cell, trial)";
  m["trial_seeds"] = trial_seeds;
  m["warnings"] = warnings;
  m["outputs"] = outputs;
  if (!error.empty()) m["error"] = error;
  return m;
}

std::vector<CellOutcome> run_cells(const std::vector<CellRequest>& cells, std::size_t jobs,
                                   std::ostream& log) {
  const std::size_t n = cells.size();
  std::vector<CellOutcome> outcomes(n);
  std::vector<std::unique_ptr<Experiment>> experiments(n);
  std::vector<std::vector<std::uint64_t>> seeds(n);
  std::vector<std::vector<TrialResult>> results(n);
  std::vector<std::vector<std::exception_ptr>> failures(n);

  struct Unit {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Unit> units;
  for (std::size_t c = 0; c < n; ++c) {
    try {
      std::filesystem::create_directories(cells[c].dir);
      if (cells[c].command == "analyze") continue;
      experiments[c] = make_experiment(cells[c].command, cells[c].params);
      const auto master = get_u64(cells[c].params, "seed");
      const std::size_t k = experiments[c]->trials();
      results[c].resize(k);
      failures[c].resize(k);
      for (std::size_t t = 0; t < k; ++t) {
        seeds[c].push_back(trial_seed(master, cells[c].cell, t));
        units.push_back({c, t});
      }
    } catch (...) {
      experiments[c].reset();
      outcomes[c].code = exit_code(std::current_exception());
      outcomes[c].error = message(std::current_exception());
    }
  }

  parallel_for(units.size(), jobs, [&](std::size_t u) {
    const auto [c, t] = units[u];
    try {
      results[c][t] = experiments[c]->run_trial(t, seeds[c][t]);
    } catch (...) {
      failures[c][t] = std::current_exception();
    }
  });

  for (std::size_t c = 0; c < n; ++c) {
    const auto& req = cells[c];
    auto& out = outcomes[c];
    std::vector<std::string> warnings;
    if (out.code == 0) {
      try {
        if (req.command == "analyze") {
          out.summary = run_analyze(req.params, req.dir, out.outputs);
        } else {
          for (std::size_t t = 0; t < failures[c].size(); ++t) {
            if (failures[c][t]) {
              out.code = exit_code(failures[c][t]);
              out.error = "trial " + std::to_string(t) + ": " + message(failures[c][t]);
              break;
            }
          }
          if (out.code == 0) {
            for (const auto& r : results[c]) warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
            out.summary = experiments[c]->finish(req.dir, results[c], out.outputs);
          }
        }
      } catch (...) {
        out.code = exit_code(std::current_exception());
        out.error = message(std::current_exception());
      }
    }
    results[c].clear();
    try {
      if (out.code == 0) {
        Json summary = Json::object();
        summary["command"] = req.command;
        summary["warnings"] = warnings;
        for (auto& [k, v] : out.summary.items()) summary[k] = v;
        write_json(req.dir / "summary.json", summary);
        out.outputs.push_back("summary.json");
        out.summary = summary;
      }
      if (std::filesystem::is_directory(req.dir)) {
        write_json(req.dir / "manifest.json", make_manifest(req, seeds[c], warnings, out.outputs, out.error));
      }
    } catch (...) {
      if (out.code == 0) {
        out.code = exit_code(std::current_exception());
        out.error = message(std::current_exception());
      }
    }
    log << "cell " << req.cell << " (" << req.command << "): "
        << (out.code == 0 ? "ok" : "failed: " + out.error) << " -> " << req.dir.string() << '\n';
    for (const auto& w : warnings) log << "  warning: " << w << '\n';
  }
  return outcomes;
}

SweepPlan plan_sweep(const IniFile& ini) {
  const ParamMap* sweep = ini.section("sweep");
  if (sweep == nullptr) throw ConfigError("sweep: config file has no [sweep] section");
  SweepPlan plan;
  const auto cmd = sweep->find("command");
  if (cmd == sweep->end()) throw ConfigError("sweep: missing 'command'");
  plan.command = cmd->second;
  if (plan.command != "mrr" && plan.command != "mg" && plan.command != "vs") {
    throw ConfigError("sweep: command must be mrr, mg or vs, got '" + plan.command + "'");
  }

  ParamMap base = defaults(plan.command);
  if (const auto p = sweep->find("preset"); p != sweep->end()) {
    apply(base, preset(plan.command, p->second), plan.command, "preset");
  }
  if (const ParamMap* section = ini.section(plan.command)) {
    apply(base, *section, plan.command, "[" + plan.command + "]");
  }
  ParamMap fixed;
  std::vector<std::vector<std::string>> values;
  for (const auto& [key, value] : *sweep) {
    if (key == "command" || key == "preset") continue;
    if (key.rfind("grid.", 0) == 0) {
      plan.grid_keys.push_back(key.substr(5));
      values.push_back(split_list(value));
    } else {
      fixed[key] = value;
    }
  }
  apply(base, fixed, plan.command, "[sweep]");
  ParamMap grid, scratch;
  for (const auto& key : plan.grid_keys) grid[key] = "";
  apply(scratch, grid, plan.command, "[sweep] grid");

  // Last key varies fastest.
  std::vector<std::size_t> index(values.size(), 0);
  while (true) {
    ParamMap cell = base;
    for (std::size_t i = 0; i < values.size(); ++i) cell[plan.grid_keys[i]] = values[i][index[i]];
    plan.cells.push_back(std::move(cell));
    std::size_t i = values.size();
    while (i > 0) {
      --i;
      if (++index[i] < values[i].size()) break;
      index[i] = 0;
      if (i == 0) return plan;
    }
    if (values.empty()) return plan;
  }
}

}  // namespace auction::cli
