#include "stiffsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace stiffsim {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string text_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw std::invalid_argument("CSV field contains a separator: " + s);
  }
  return s;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

// Reads the header and rows, checking the column names and counts.
std::vector<std::vector<std::string>> read_table(
    std::istream& in, const std::vector<std::string>& columns) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != columns) {
    throw std::runtime_error("CSV: unexpected header '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != columns.size()) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) +
                               ": expected " + std::to_string(columns.size()) +
                               " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double number_at(const std::vector<std::string>& f, std::size_t i) {
  try {
    return parse_number(f[i]);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("CSV: ") + e.what());
  }
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> bench_columns() {
  return {"scenario", "integrator", "mmm",      "dt_ms",
          "dt_c_ms",  "K",          "B",        "mu",
          "err_mean", "err_max",    "ns_per_step", "realtime_factor"};
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  write_row(out, bench_columns());
  for (const BenchRecord& r : rows) {
    write_row(out, {text_field(r.scenario), text_field(r.integrator),
                    text_field(r.mmm), format_number(r.dt_ms),
                    format_number(r.dt_c_ms), format_number(r.stiffness),
                    format_number(r.damping), format_number(r.mu),
                    format_number(r.err_mean), format_number(r.err_max),
                    format_number(r.ns_per_step),
                    format_number(r.realtime_factor)});
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::vector<BenchRecord> out;
  for (const auto& f : read_table(in, bench_columns())) {
    BenchRecord r;
    r.scenario = f[0];
    r.integrator = f[1];
    r.mmm = f[2];
    r.dt_ms = number_at(f, 3);
    r.dt_c_ms = number_at(f, 4);
    r.stiffness = number_at(f, 5);
    r.damping = number_at(f, 6);
    r.mu = number_at(f, 7);
    r.err_mean = number_at(f, 8);
    r.err_max = number_at(f, 9);
    r.ns_per_step = number_at(f, 10);
    r.realtime_factor = number_at(f, 11);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> stability_columns() {
  return {"scenario", "integrator", "mmm", "dt_ms", "dt_c_ms",
          "K",        "B",          "mu",  "stable"};
}

void write_stability_csv(std::ostream& out,
                         const std::vector<StabilityRow>& rows) {
  write_row(out, stability_columns());
  for (const StabilityRow& r : rows) {
    write_row(out, {text_field(r.scenario), text_field(r.integrator),
                    text_field(r.mmm), format_number(r.dt_ms),
                    format_number(r.dt_c_ms), format_number(r.stiffness),
                    format_number(r.damping), format_number(r.mu),
                    r.stable ? "1" : "0"});
  }
}

std::vector<StabilityRow> read_stability_csv(std::istream& in) {
  std::vector<StabilityRow> out;
  for (const auto& f : read_table(in, stability_columns())) {
    StabilityRow r;
    r.scenario = f[0];
    r.integrator = f[1];
    r.mmm = f[2];
    r.dt_ms = number_at(f, 3);
    r.dt_c_ms = number_at(f, 4);
    r.stiffness = number_at(f, 5);
    r.damping = number_at(f, 6);
    r.mu = number_at(f, 7);
    if (f[8] != "0" && f[8] != "1") {
      throw std::runtime_error("CSV: stable must be 0 or 1");
    }
    r.stable = f[8] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> kernel_columns() {
  return {"scenario", "policy",      "order",        "dt_ms",
          "samples",  "ns_per_call", "rel_err_mean", "rel_err_max"};
}

void write_kernel_csv(std::ostream& out,
                      const std::vector<KernelBenchRow>& rows) {
  write_row(out, kernel_columns());
  for (const KernelBenchRow& r : rows) {
    write_row(out, {text_field(r.scenario), text_field(r.policy),
                    std::to_string(r.order), format_number(r.dt_ms),
                    std::to_string(r.samples), format_number(r.ns_per_call),
                    format_number(r.rel_err_mean),
                    format_number(r.rel_err_max)});
  }
}

std::vector<KernelBenchRow> read_kernel_csv(std::istream& in) {
  std::vector<KernelBenchRow> out;
  for (const auto& f : read_table(in, kernel_columns())) {
    KernelBenchRow r;
    r.scenario = f[0];
    r.policy = f[1];
    r.order = int(number_at(f, 2));
    r.dt_ms = number_at(f, 3);
    r.samples = int(number_at(f, 4));
    r.ns_per_call = number_at(f, 5);
    r.rel_err_mean = number_at(f, 6);
    r.rel_err_max = number_at(f, 7);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stiffsim
