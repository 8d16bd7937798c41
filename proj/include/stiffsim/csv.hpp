#pragma once

// CSV files written by the command-line tool. Numbers use %.17g so that
// they parse back to the same doubles; infinities are written as inf.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stiffsim/bench.hpp"

namespace stiffsim {

std::string format_number(double x);
// Throws std::invalid_argument on anything that is not a full number.
double parse_number(std::string_view text);

// scenario,integrator,mmm,dt_ms,dt_c_ms,K,B,mu,err_mean,err_max,
// ns_per_step,realtime_factor
std::vector<std::string> bench_columns();
void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows);
// Throws std::runtime_error on a malformed file.
std::vector<BenchRecord> read_bench_csv(std::istream& in);

struct StabilityRow {
  std::string scenario;
  std::string integrator;
  std::string mmm;
  double dt_ms = 0.0;
  double dt_c_ms = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;
  double mu = 0.0;
  bool stable = false;

  friend bool operator==(const StabilityRow&, const StabilityRow&) = default;
};

std::vector<std::string> stability_columns();
void write_stability_csv(std::ostream& out,
                         const std::vector<StabilityRow>& rows);
std::vector<StabilityRow> read_stability_csv(std::istream& in);

std::vector<std::string> kernel_columns();
void write_kernel_csv(std::ostream& out,
                      const std::vector<KernelBenchRow>& rows);
std::vector<KernelBenchRow> read_kernel_csv(std::istream& in);

}  // namespace stiffsim
