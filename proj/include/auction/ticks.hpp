#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace auction::ticks {

/// One quote record of a MetaTrader4-style export.
///
/// The price fields keep the text they were parsed from so that a record
/// can be written back byte-for-byte; arithmetic uses the double values.
struct Tick {
  std::chrono::sys_seconds time{};
  double bid = 0.0;
  double ask = 0.0;
  std::string bid_text;
  std::string ask_text;
};

/// Builds a tick from numeric quotes; the text fields get the shortest
/// representation that parses back to the same doubles.
Tick make_tick(std::chrono::sys_seconds time, double bid, double ask);

/// Parses `YYYY/MM/DD,HH:MM:SS,bid,ask`. A trailing '\r' is ignored.
/// Throws ParseError carrying `line_no` and the offending field.
Tick parse_line(std::string_view line, std::size_t line_no = 1);

/// Inverse of parse_line.
std::string format_tick(const Tick& tick);

struct TickFile {
  std::vector<Tick> ticks;
  /// Lines whose timestamp is earlier than the previous line's. They are
  /// kept in file order.
  std::size_t out_of_order = 0;
};

/// Reads every non-blank line of a quote file.
TickFile read_ticks(std::istream& in);
TickFile read_ticks(const std::filesystem::path& path);

void write_ticks(std::ostream& out, std::span<const Tick> ticks);

/// How sgn(0) is resolved when the mid point does not move.
enum class ZeroPolicy {
  carry_forward,  ///< repeat the previous nonzero sign, +1 if there is none
  drop,           ///< remove the tick that repeats the previous mid point
  plus_one,       ///< always +1
};

ZeroPolicy parse_zero_policy(std::string_view name);
std::string_view to_string(ZeroPolicy policy);

/// Mid point, return, signal and spread of a quote sequence.
/// ret, signal have one entry fewer than mid and spread.
struct DerivedSeries {
  std::vector<double> mid;
  std::vector<double> ret;
  std::vector<int> signal;
  std::vector<double> spread;

  std::size_t length() const noexcept { return mid.size(); }
};

DerivedSeries derive_series(std::span<const Tick> ticks,
                            ZeroPolicy zero_policy = ZeroPolicy::carry_forward);

/// sgn of each value with zeros resolved by carrying the last nonzero sign
/// forward (+1 before the first nonzero value).
std::vector<int> carry_forward_signs(std::span<const double> values);

/// Equal-width histogram with the Gaussian of the sample moments.
///
/// Bins span [min, max] with the maximum counted in the last bin. A sample
/// with a single distinct value v uses the range [v - 0.5, v + 0.5].
struct EmpiricalHistogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  double gaussian_mean = 0.0;
  /// Square root of the 1/T variance.
  double gaussian_std = 0.0;
};

EmpiricalHistogram histogram(std::span<const double> values, std::size_t n_bins);
EmpiricalHistogram return_histogram(const DerivedSeries& series, std::size_t n_bins);
EmpiricalHistogram spread_distribution(const DerivedSeries& series, std::size_t n_bins);

}  // namespace auction::ticks
