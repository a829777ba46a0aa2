#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "auction/adaptive.hpp"
#include "auction/lag_stats.hpp"
#include "auction/random.hpp"
#include "auction/ticks.hpp"
#include "auction/vikram_sinha.hpp"
#include "cli.hpp"
#include "experiment.hpp"
#include "params.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace auction;
using namespace auction::cli;

namespace {

constexpr std::uint64_t kMaster = 1;

struct Batch {
  std::vector<TrialResult> results;
  std::vector<std::vector<double>> C, R;
  stats::TrialMean c, r;
  double seconds = 0.0;

  double nonlinearity() const { return stats::scatter_diagnostics(c.mean, r.mean).nonlinearity; }
};

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

Batch run_batch(const std::string& command, const ParamMap& overrides) {
  ParamMap params = defaults(command);
  apply(params, overrides, command, "acceptance");
  params["series"] = "none";
  const auto experiment = make_experiment(command, params);
  Batch b;
  b.results.resize(experiment->trials());
  const auto start = std::chrono::steady_clock::now();
  parallel_for(b.results.size(), jobs(), [&](std::size_t k) {
    b.results[k] = experiment->run_trial(k, trial_seed(kMaster, 0, k));
  });
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& r : b.results) {
    b.C.push_back(r.C);
    b.R.push_back(r.R);
  }
  b.c = stats::average_trials(b.C);
  b.r = stats::average_trials(b.R);
  return b;
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double std_dev(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) std::fprintf(stderr, "auction-lab failed (%d): %s\n", code, err.str().c_str());
  return code;
}

// Relative path -> contents of every file under dir.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  }
  return files;
}

const std::vector<double> kRhos = {-0.9, -0.1, 0.1, 0.5};

void mrr_criteria() {
  const double theta = 1.5;
  std::map<double, Batch> runs;
  double seconds = 0.0;
  for (double rho : kRhos) {
    runs[rho] = run_batch("mrr", {{"rho", fmt("%g", rho)}, {"T", "100000"}, {"trials", "10"}, {"max_lag", "20"},
                                  {"vol_max_lag", "200"}});
    seconds += runs[rho].seconds;
  }

  bool ok = seconds < 5.0;
  double worst_c = 0.0, worst_z = 0.0;
  for (double rho : kRhos) {
    const auto& b = runs[rho];
    for (std::size_t l = 1; l <= 20; ++l) {
      const double dc = std::abs(b.c.mean[l - 1] - std::pow(rho, l));
      const double z = std::abs(b.r.mean[l - 1] - theta * (1.0 - std::pow(rho, l))) / b.r.stderr_mean[l - 1];
      worst_c = std::max(worst_c, dc);
      worst_z = std::max(worst_z, z);
      ok = ok && dc <= 0.02 && z <= 3.0;
    }
  }
  report(1, ok, "MRR C(l), R(l) vs closed form",
         fmt("max|dC|=%.4f max|dR|/stderr=%.2f time=%.2fs", worst_c, worst_z, seconds));

  ok = true;
  std::string detail;
  for (double rho : kRhos) {
    double v1 = 0.0, v200 = 0.0;
    for (const auto& r : runs[rho].results) {
      v1 += r.sigma2[0] / 10.0;
      v200 += r.sigma2[199] / 10.0;
    }
    const double e1 = 1.0 + theta * theta * (1.0 - rho) * (1.0 - rho);
    const double e200 = 1.0 + theta * theta * (1.0 - rho * rho);
    const double d1 = std::abs(v1 - e1) / e1;
    const double d200 = std::abs(v200 - e200) / e200;
    ok = ok && d1 <= 0.02 && d200 <= 0.05;
    detail += fmt("rho=%g: %.2f%%/%.2f%% ", rho, 100 * d1, 100 * d200);
  }
  report(2, ok, "MRR volatility at lags 1 and 200", detail);

  const auto d = stats::scatter_diagnostics(runs[0.5].c.mean, runs[0.5].r.mean);
  report(3, std::abs(d.slope + theta) <= 0.02 * theta && d.r_squared >= 0.999 && d.nonlinearity <= 0.02,
         "MRR scatter linearity", fmt("slope=%.4f r2=%.5f nonlinearity=%.4f", d.slope, d.r_squared, d.nonlinearity));
}

std::vector<double> baseline_c;

bool non_monotonic(const Batch& b, std::string& detail) {
  const auto drop = stats::strongest_response_drop(b.R);
  detail += fmt("drop R(%zu)-R(%zu)=%.3g z=%.2f", drop.first, drop.second, drop.drop, drop.z);
  return drop.z > 3.0;
}

void mg_criteria() {
  const ParamMap base = {{"max_lag", "100"}};
  auto with = [&](ParamMap extra) {
    extra.insert(base.begin(), base.end());
    return extra;
  };

  const Batch plain = run_batch("mg", base);
  double worst = 0.0;
  for (std::size_t l = 2; l <= 10; ++l) worst = std::max(worst, std::abs(plain.c.mean[l - 1]));
  report(4, worst <= 0.01 && plain.seconds < 60.0, "minority game baseline C(l) ~ 0 for l >= 2",
         fmt("max|C(2..10)|=%.4f time=%.1fs on %zu worker(s)", worst, plain.seconds, jobs()));

  bool ok = true;
  double lo = 1e9, hi = -1e9;
  for (const auto& r : plain.results) {
    const double s = r.summary["sigma_A"].get<double>();
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    ok = ok && s >= 0.30 && s <= 0.60;
  }
  report(5, ok, "sigma_A band", fmt("sigma_A in [%.4f, %.4f]", lo, hi));

  ok = true;
  std::string detail;
  Batch psi05;
  for (const char* psi : {"0.05", "0.1"}) {
    Batch b = run_batch("mg", with({{"psi", psi}}));
    const auto& C = b.c.mean;
    ok = ok && C[0] > 0.0 && C[0] >= 3.0 * b.c.stderr_mean[0] && C[0] > C[2] && C[2] > std::abs(C[9]);
    detail += fmt("psi=%s: C1=%.4f(%.4f) C3=%.4f C10=%.4f ", psi, C[0], b.c.stderr_mean[0], C[2], C[9]);
    if (std::string(psi) == "0.05") psi05 = std::move(b);
  }
  report(6, ok, "bias gives positive decaying C(l)", detail);

  detail.clear();
  report(7, non_monotonic(psi05, detail), "non-monotonic response under bias", detail);

  const Batch mrr = run_batch("mrr", {{"rho", "0.5"}, {"T", "100010"}, {"trials", "10"}, {"max_lag", "100"},
                                      {"vol_max_lag", "1"}});
  const double nl_mg = psi05.nonlinearity();
  const double nl_mrr = mrr.nonlinearity();
  report(8, nl_mg >= 5.0 * nl_mrr, "scatter shape separation",
         fmt("nonlinearity mg=%.4f mrr=%.4f ratio=%.2f", nl_mg, nl_mrr, nl_mg / nl_mrr));

  ok = true;
  detail.clear();
  Batch latest;
  for (const char* f2 : {"1", "0.9"}) {
    Batch b = run_batch("mg", with({{"adapt", "latest"}, {"f1", "0.01"}, {"f2", f2}}));
    const bool c1 = b.c.mean[0] > 0.0 && b.c.mean[0] >= 3.0 * b.c.stderr_mean[0];
    detail += fmt("f2=%s: C1=%.4f(%.4f) ", f2, b.c.mean[0], b.c.stderr_mean[0]);
    const bool nm = non_monotonic(b, detail);
    detail += "; ";
    ok = ok && c1 && nm;
    if (std::string(f2) == "1") latest = std::move(b);
  }
  report(9, ok, "latest-mode adaptation", detail);

  const Batch history = run_batch("mg", with({{"adapt", "history"}, {"alpha", "0.01"}, {"f2", "1"}}));
  auto per_trial = [](const Batch& b) {
    std::vector<double> v;
    for (std::size_t k = 0; k < b.C.size(); ++k) v.push_back(stats::scatter_diagnostics(b.C[k], b.R[k]).nonlinearity);
    return median(v);
  };
  const double nh = per_trial(history);
  const double nlt = per_trial(latest);
  report(10, nh >= nlt, "history-mode nonlinearity vs latest mode",
         fmt("median nonlinearity history=%.4f latest=%.4f", nh, nlt));

  // Criterion 12 compares against a single minority-game run.
  baseline_c.assign(plain.C[0].begin() + 1, plain.C[0].begin() + 50);
}

void vs_criterion() {
  bool ok = true;
  std::string detail;
  {
    vs::VsConfig c;
    c.n_agents = 1001;
    c.mu = 0.0;
    c.window = 50;
    c.rounds = 200;
    const auto run = vs::run_vs(c);
    const bool all = std::all_of(run.rounds.begin(), run.rounds.end(),
                                 [&](const vs::VsRound& r) { return r.participants == c.n_agents; });
    ok = ok && all && run.mean_participation() == 1.0;
    detail += fmt("mu=0 participation=%.3f; ", run.mean_participation());

    vs::VsMarket m(vs::VsConfig{});
    const double before = m.price();
    const auto r = m.apply(std::vector<int>(20000, 0), std::vector<double>(20000, 0.0));
    bool unchanged = r.price == before;
    vs::VsConfig even;
    even.n_agents = 2000;
    even.window = 100;
    even.rounds = 3000;
    const auto er = vs::run_vs(even);
    double prev = even.p0;
    std::size_t zeros = 0;
    for (const auto& round : er.rounds) {
      if (round.A == 0.0) {
        ++zeros;
        unchanged = unchanged && round.price == prev;
      }
      prev = round.price;
    }
    ok = ok && unchanged && zeros > 0;
    detail += fmt("A=0 rounds unchanged=%s (%zu); ", unchanged ? "yes" : "no", zeros);
  }
  const Batch full = run_batch("vs", {{"trials", "1"}, {"max_lag", "50"}});
  const std::size_t clamps = full.results[0].summary["clamp_events"].get<std::size_t>();
  const std::vector<double> vs_c(full.C[0].begin() + 1, full.C[0].end());
  const double ratio = std_dev(vs_c) / std_dev(baseline_c);
  ok = ok && clamps == 0 && ratio >= 3.0 && full.seconds < 120.0;
  detail += fmt("clamps=%zu std ratio=%.2f time=%.1fs", clamps, ratio, full.seconds);
  report(12, ok, "mean-field market properties", detail);
}

void omega_criterion() {
  bool ok = true;
  std::size_t checked = 0;
  for (std::size_t M = 1; M <= 10; ++M) {
    for (std::size_t code = 0; code < (std::size_t{1} << M); ++code) {
      std::vector<int> h(M);
      long long expect = 0;
      for (std::size_t tau = 1; tau <= M; ++tau) {
        h[tau - 1] = (code >> (tau - 1)) & 1U ? 1 : -1;
        expect += h[tau - 1] * static_cast<long long>(std::pow(2.0, static_cast<double>(M - tau)));
      }
      ok = ok && adapt::omega(h).value == expect;
      ++checked;
    }
  }
  const auto top = adapt::omega(std::vector<int>(9, 1)).value;
  const auto bottom = adapt::omega(std::vector<int>(9, -1)).value;
  ok = ok && top == 511 && bottom == -511;
  report(11, ok, "Omega vs brute force", fmt("%zu histories, M=9 endpoints %lld/%lld", checked,
                                             static_cast<long long>(top), static_cast<long long>(bottom)));
}

void parser_criterion() {
  const char* const lines[] = {
      "2009/12/24,17:17:40,131.053,131.092", "2009/12/24,17:17:41,131.053,131.088",
      "2009/12/24,17:17:41,131.052,131.088", "2009/12/24,17:17:43,131.048,131.071",
      "2009/12/24,17:17:44,131.043,131.076"};
  std::string text;
  for (const char* l : lines) text += std::string(l) + "\n";
  std::istringstream in(text);
  const auto file = ticks::read_ticks(in);
  std::ostringstream out;
  ticks::write_ticks(out, file.ticks);
  report(13, out.str() == text && file.ticks.size() == 5, "quote line round trip",
         fmt("%zu lines byte-identical=%s", file.ticks.size(), out.str() == text ? "yes" : "no"));
}

void determinism_criterion(const fs::path& root) {
  const fs::path dir = root / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream ini(dir / "sweep.ini");
    ini << "[sweep]\ncommand = mg\nN = 101\nM = 5\nT = 3000\ntrials = 3\nmax_lag = 20\nadapt = latest\n"
           "grid.psi = 0, 0.05\ngrid.f2 = 1, 0.9\n";
  }
  const std::vector<std::vector<std::string>> commands = {
      {"mrr", "--T", "20000", "--trials", "4", "--max_lag", "20", "--ticks", "true", "--series", "all"},
      {"mg", "--N", "201", "--M", "6", "--T", "5000", "--trials", "4", "--max_lag", "30", "--psi", "0.05",
       "--series", "all", "--ticks", "true"},
      {"mg", "--N", "201", "--M", "6", "--T", "5000", "--trials", "3", "--max_lag", "30", "--adapt", "history",
       "--alpha", "0.2", "--f2", "0.9", "--series", "all"},
      {"vs", "--N", "2000", "--tau", "100", "--T", "3000", "--trials", "3", "--max_lag", "20", "--series", "all"},
      {"sweep", (dir / "sweep.ini").string()},
  };
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::map<std::string, std::string>> snaps;
    for (const char* j : {"1", "1", "8"}) {
      const fs::path out = dir / fmt("c%zu_%zu", i, snaps.size());
      auto args = commands[i];
      args.insert(args.end(), {"--out", out.string(), "--jobs", j});
      ok = ok && invoke(args) == 0;
      snaps.push_back(snapshot(out));
    }
    const bool same = !snaps[0].empty() && snaps[0] == snaps[1] && snaps[0] == snaps[2];
    ok = ok && same;
    detail += fmt("%s%s:%zu files %s", i ? ", " : "", commands[i][0].c_str(), snaps[0].size(), same ? "same" : "DIFFER");
  }
  // analyze on one of the generated quote files
  std::vector<std::map<std::string, std::string>> snaps;
  for (const char* j : {"1", "8"}) {
    const fs::path out = dir / fmt("analyze_%s", j);
    ok = ok && invoke({"analyze", (dir / "c1_0" / "ticks_trial0.txt").string(), "--sbar", "0.1", "--out",
                       out.string(), "--jobs", j}) == 0;
    snaps.push_back(snapshot(out));
  }
  const bool same = snaps[0] == snaps[1];
  ok = ok && same;
  detail += fmt(", analyze:%zu files %s", snaps[0].size(), same ? "same" : "DIFFER");
  report(14, ok, "deterministic outputs across runs and worker counts", detail);
}

nlohmann::json analyze_file(const fs::path& ticks, const fs::path& out) {
  if (invoke({"analyze", ticks.string(), "--out", out.string()}) != 0) return nullptr;
  return nlohmann::json::parse(slurp(out / "summary.json"));
}

void empirical_criterion(const fs::path& root) {
  const fs::path dir = root / "empirical";
  fs::remove_all(dir);
  bool ok = invoke({"mrr", "--rho", "0.5", "--sigma", "0", "--T", "100000", "--trials", "1", "--ticks", "true",
                    "--max_lag", "20", "--out", (dir / "mrr").string()}) == 0;
  ok = ok && invoke({"mg", "--psi", "0.05", "--trials", "1", "--ticks", "true", "--out", (dir / "mg").string()}) == 0;
  if (!ok) {
    report(15, false, "analysis of generated quote files", "generation failed");
    return;
  }
  const auto a = analyze_file(dir / "mrr" / "ticks_trial0.txt", dir / "mrr_analyze");
  const auto b = analyze_file(dir / "mg" / "ticks_trial0.txt", dir / "mg_analyze");
  if (a.is_null() || b.is_null() || !a["rho_hat"].is_number() || !b["nonlinearity"].is_number() ||
      !a["nonlinearity"].is_number()) {
    report(15, false, "analysis of generated quote files", "analyze failed");
    return;
  }
  const double rho_hat = a["rho_hat"].get<double>();
  const double nl_mrr = a["nonlinearity"].get<double>();
  const double nl_mg = b["nonlinearity"].get<double>();
  report(15, std::abs(rho_hat - 0.5) <= 0.02 && nl_mg >= 5.0 * nl_mrr, "analysis of generated quote files",
         fmt("rho_hat=%.4f nonlinearity mg=%.4f mrr=%.4f", rho_hat, nl_mg, nl_mrr));
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "auction_lab_acceptance";
  fs::create_directories(root);
  try {
    mrr_criteria();
    mg_criteria();
    omega_criterion();
    vs_criterion();
    parser_criterion();
    determinism_criterion(root);
    empirical_criterion(root);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
