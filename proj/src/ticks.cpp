#include "auction/ticks.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "auction/error.hpp"

namespace auction::ticks {
namespace {

using namespace std::chrono;

std::string shortest(double value) {
  std::array<char, 400> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed);
  return std::string(buf.data(), end);
}

// Fixed-width unsigned field, e.g. the "2009" in "2009/12/24".
bool read_digits(std::string_view text, std::size_t pos, std::size_t width, unsigned& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return true;
}

sys_days parse_date(std::string_view text, std::size_t line_no) {
  unsigned y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '/' || text[7] != '/' || !read_digits(text, 0, 4, y) ||
      !read_digits(text, 5, 2, m) || !read_digits(text, 8, 2, d)) {
    throw ParseError(line_no, "date", "expected YYYY/MM/DD, got '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{static_cast<int>(y)}, month{m}, day{d}};
  if (!ymd.ok()) {
    throw ParseError(line_no, "date", "no such calendar date '" + std::string(text) + "'");
  }
  return sys_days{ymd};
}

seconds parse_time(std::string_view text, std::size_t line_no) {
  unsigned h = 0, m = 0, s = 0;
  if (text.size() != 8 || text[2] != ':' || text[5] != ':' || !read_digits(text, 0, 2, h) ||
      !read_digits(text, 3, 2, m) || !read_digits(text, 6, 2, s) || h > 23 || m > 59 || s > 59) {
    throw ParseError(line_no, "time", "expected HH:MM:SS, got '" + std::string(text) + "'");
  }
  return hours{h} + minutes{m} + seconds{s};
}

double parse_price(std::string_view text, std::size_t line_no, const char* field) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ParseError(line_no, field, "not a decimal price: '" + std::string(text) + "'");
  }
  return value;
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

Tick make_tick(sys_seconds time, double bid, double ask) {
  return Tick{time, bid, ask, shortest(bid), shortest(ask)};
}

Tick parse_line(std::string_view line, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::array<std::string_view, 4> fields{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto piece = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    if (count < fields.size()) fields[count] = piece;
    ++count;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != 4) {
    throw ParseError(line_no, "record",
                     "expected 4 comma-separated fields, got " + std::to_string(count));
  }

  Tick tick;
  tick.time = sys_seconds{parse_date(fields[0], line_no)} + parse_time(fields[1], line_no);
  tick.bid = parse_price(fields[2], line_no, "bid");
  tick.ask = parse_price(fields[3], line_no, "ask");
  tick.bid_text = std::string(fields[2]);
  tick.ask_text = std::string(fields[3]);
  return tick;
}

std::string format_tick(const Tick& tick) {
  const auto day = floor<days>(tick.time);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tick.time - day};
  std::array<char, 32> stamp{};
  std::snprintf(stamp.data(), stamp.size(), "%04d/%02u/%02u,%02d:%02d:%02d",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  std::string out(stamp.data());
  out += ',';
  out += tick.bid_text.empty() ? shortest(tick.bid) : tick.bid_text;
  out += ',';
  out += tick.ask_text.empty() ? shortest(tick.ask) : tick.ask_text;
  return out;
}

TickFile read_ticks(std::istream& in) {
  TickFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Tick tick = parse_line(line, line_no);
    if (!file.ticks.empty() && tick.time < file.ticks.back().time) ++file.out_of_order;
    file.ticks.push_back(std::move(tick));
  }
  return file;
}

TickFile read_ticks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_ticks(in);
}

void write_ticks(std::ostream& out, std::span<const Tick> ticks) {
  for (const auto& tick : ticks) out << format_tick(tick) << '\n';
}

ZeroPolicy parse_zero_policy(std::string_view name) {
  if (name == "carry-forward") return ZeroPolicy::carry_forward;
  if (name == "drop") return ZeroPolicy::drop;
  if (name == "plus-one") return ZeroPolicy::plus_one;
  throw ConfigError("unknown zero policy '" + std::string(name) +
                    "' (expected carry-forward, drop or plus-one)");
}

std::string_view to_string(ZeroPolicy policy) {
  switch (policy) {
    case ZeroPolicy::carry_forward: return "carry-forward";
    case ZeroPolicy::drop: return "drop";
    case ZeroPolicy::plus_one: return "plus-one";
  }
  return "?";
}

std::vector<int> carry_forward_signs(std::span<const double> values) {
  std::vector<int> out;
  out.reserve(values.size());
  int last = 1;
  for (double v : values) {
    const int s = sign(v);
    if (s != 0) last = s;
    out.push_back(last);
  }
  return out;
}

DerivedSeries derive_series(std::span<const Tick> ticks, ZeroPolicy zero_policy) {
  if (ticks.size() < 2) {
    throw InsufficientData("need at least 2 ticks to derive returns, got " +
                           std::to_string(ticks.size()));
  }

  DerivedSeries s;
  s.mid.reserve(ticks.size());
  s.spread.reserve(ticks.size());
  for (const auto& tick : ticks) {
    const double mid = (tick.ask + tick.bid) / 2.0;
    if (zero_policy == ZeroPolicy::drop && !s.mid.empty() && mid == s.mid.back()) continue;
    s.mid.push_back(mid);
    s.spread.push_back(tick.ask - tick.bid);
  }
  if (s.mid.size() < 2) {
    throw InsufficientData("fewer than 2 distinct mid points after dropping zero returns");
  }

  s.ret.resize(s.mid.size() - 1);
  for (std::size_t t = 0; t + 1 < s.mid.size(); ++t) s.ret[t] = s.mid[t + 1] - s.mid[t];

  if (zero_policy == ZeroPolicy::carry_forward || zero_policy == ZeroPolicy::drop) {
    s.signal = carry_forward_signs(s.ret);
  } else {
    s.signal.reserve(s.ret.size());
    for (double r : s.ret) s.signal.push_back(r < 0.0 ? -1 : 1);
  }
  return s;
}

EmpiricalHistogram histogram(std::span<const double> values, std::size_t n_bins) {
  if (values.empty()) throw InsufficientData("histogram of an empty sample");
  if (n_bins < 2) throw ConfigError("histogram needs at least 2 bins");

  EmpiricalHistogram h;
  const double n = static_cast<double>(values.size());
  h.gaussian_mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - h.gaussian_mean) * (v - h.gaussian_mean);
  h.gaussian_std = std::sqrt(ss / n);

  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b) h.bin_edges[b] = lo + width * static_cast<double>(b);
  h.bin_edges.back() = hi;

  h.counts.assign(n_bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, n_bins - 1)]++;
  }
  return h;
}

EmpiricalHistogram return_histogram(const DerivedSeries& series, std::size_t n_bins) {
  return histogram(series.ret, n_bins);
}

EmpiricalHistogram spread_distribution(const DerivedSeries& series, std::size_t n_bins) {
  return histogram(series.spread, n_bins);
}

}  // namespace auction::ticks
