#include "stiffsim/run.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "stiffsim/bench.hpp"
#include "stiffsim/csv.hpp"
#include "stiffsim/errors.hpp"
#include "stiffsim/simulator.hpp"

namespace stiffsim {

namespace {

std::string mmm_label(const IntegratorSetup& s) {
  return s.kind == IntegratorKind::kExpo ? s.policy.name() : "-";
}

// Writes through a temporary string so a failed run leaves no partial file.
bool write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body,
                std::ostream& log) {
  std::ostringstream buf;
  body(buf);
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  out << buf.str();
  out.close();
  if (!out) {
    log << "error: cannot write " << path.string() << "\n";
    return false;
  }
  log << "wrote " << path.string() << "\n";
  return true;
}

int simulate(const RunConfig& c, const Scenario& s, std::ostream& log,
             std::ostream& csv) {
  const ModelInfo& mi = s.model->info();
  csv << "integrator,mmm,dt_ms,t";
  for (int i = 0; i < mi.nq; ++i) csv << ",q" << i;
  for (int i = 0; i < mi.nv; ++i) csv << ",v" << i;
  for (int j = 0; j < mi.nc; ++j) {
    csv << ",fx" << j << ",fy" << j << ",fz" << j;
  }
  csv << '\n';

  int code = kExitOk;
  for (const IntegratorSetup& setup : c.setups()) {
    for (const double dt : c.dts(s)) {
      const int steps = steps_per_tick(s.dt_c, dt);
      Simulator sim(s.model, setup, s.initial_contacts(), s.initial);
      auto row = [&](const std::vector<Vec3>& forces) {
        csv << to_string(setup.kind) << ',' << mmm_label(setup) << ','
            << format_number(dt * 1e3) << ','
            << format_number(sim.time());
        for (int i = 0; i < mi.nq; ++i) csv << ',' << format_number(sim.state().q(i));
        for (int i = 0; i < mi.nv; ++i) csv << ',' << format_number(sim.state().v(i));
        for (int j = 0; j < mi.nc; ++j) {
          const Vec3 f = j < int(forces.size()) ? forces[j] : Vec3::Zero();
          csv << ',' << format_number(f.x()) << ',' << format_number(f.y())
              << ',' << format_number(f.z());
        }
        csv << '\n';
      };
      row({});
      bool diverged = false;
      for (int k = 0; k < s.ticks() && !diverged; ++k) {
        const Eigen::VectorXd tau = s.control(sim.state(), k * s.dt_c);
        for (int i = 0; i < steps; ++i) {
          try {
            sim.step(tau, dt);
          } catch (const IntegrationDivergedError& e) {
            log << setup.label() << " dt = " << dt * 1e3 << " ms: " << e.what()
                << "\n";
            diverged = true;
            break;
          }
          row(sim.last_report().force);
          if (!(sim.max_speed() < kDivergenceSpeed)) {
            log << setup.label() << " dt = " << dt * 1e3
                << " ms: diverged at t = " << sim.time() << " s\n";
            diverged = true;
            break;
          }
        }
      }
      if (diverged) code = kExitDiverged;
    }
  }
  return code;
}

int accuracy(const RunConfig& c, const Scenario& s, std::ostream& log,
             std::vector<BenchRecord>& rows) {
  int code = kExitOk;
  for (const IntegratorSetup& setup : c.setups()) {
    log << "accuracy " << s.name << " " << setup.label() << "\n";
    bool diverged = false;
    for (BenchRecord& r :
         speed_accuracy_sweep(s, {setup}, c.dts(s), c.repetitions)) {
      diverged = diverged || truth_diverged(r);
      rows.push_back(std::move(r));
    }
    if (diverged) {
      log << "  ground truth diverged\n";
      code = kExitDiverged;
    }
  }
  return code;
}

int sweep(const RunConfig& c, const Scenario& s, std::ostream& log,
          std::vector<BenchRecord>& rows) {
  const double k = *c.stiffness;
  const double xi =
      c.damping_ratio ? *c.damping_ratio : damping_ratio(k, *c.damping);
  int code = kExitOk;
  for (const IntegratorSetup& setup : c.setups()) {
    for (const double dt : c.dts(s)) {
      log << "sweep " << s.name << " " << setup.label() << " dt = " << dt * 1e3
          << " ms\n";
      for (BenchRecord& r :
           stiffness_damping_sweep(s.name, c.overrides(), setup, dt, c.k_grid,
                                   xi, c.xi_grid, k, c.repetitions)) {
        if (truth_diverged(r)) {
          log << "  ground truth diverged at K = " << r.stiffness
              << ", B = " << r.damping << "\n";
          code = kExitDiverged;
        }
        rows.push_back(std::move(r));
      }
    }
  }
  return code;
}

int stability(const RunConfig& c, const Scenario& s, std::ostream& log,
              std::vector<StabilityRow>& rows) {
  int code = kExitOk;
  for (const IntegratorSetup& setup : c.setups()) {
    const StabilityResult res = stability_search(s, setup, c.dts(s));
    for (std::size_t i = 0; i < res.dts.size(); ++i) {
      StabilityRow r;
      r.scenario = s.name;
      r.integrator = to_string(setup.kind);
      r.mmm = mmm_label(setup);
      r.dt_ms = res.dts[i] * 1e3;
      r.dt_c_ms = s.dt_c * 1e3;
      r.stiffness = s.contact.stiffness.z();
      r.damping = s.contact.damping.z();
      r.mu = s.contact.mu;
      r.stable = res.stable[i];
      rows.push_back(r);
    }
    log << "stability " << s.name << " " << setup.label()
        << ": max stable dt = " << res.max_stable_dt * 1e3 << " ms";
    if (!res.monotone) {
      log << " (not monotone in dt)";
      code = kExitDiverged;
    }
    log << "\n";
  }
  return code;
}

void expm_bench(const RunConfig& c, const Scenario& s, std::ostream& log,
                std::vector<KernelBenchRow>& rows) {
  std::vector<PadePolicy> policies;
  for (const std::string& m : c.mmm) policies.push_back(PadePolicy::parse(m));
  for (const double dt : c.dts(s)) {
    const auto samples = collect_kernel_samples(s, dt, c.samples);
    log << "expm-bench " << s.name << " dt = " << dt * 1e3 << " ms: "
        << samples.size() << " contact systems\n";
    if (samples.empty()) continue;
    for (KernelBenchRow& r :
         kernel_benchmark(s.name, samples, policies, dt, c.repetitions)) {
      rows.push_back(std::move(r));
    }
  }
}

}  // namespace

std::filesystem::path output_path(const RunConfig& config) {
  std::filesystem::path p = config.output_name();
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

int run(const RunConfig& config, std::ostream& log) {
  Scenario s;
  try {
    s = make_scenario(config.scenario, config.overrides());
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::filesystem::path path = output_path(config);
  int code = kExitOk;
  std::function<void(std::ostream&)> body;

  if (config.command == "simulate") {
    std::ostringstream csv;
    code = simulate(config, s, log, csv);
    body = [text = csv.str()](std::ostream& out) { out << text; };
  } else if (config.command == "accuracy" || config.command == "sweep") {
    std::vector<BenchRecord> rows;
    code = config.command == "accuracy" ? accuracy(config, s, log, rows)
                                        : sweep(config, s, log, rows);
    body = [rows](std::ostream& out) { write_bench_csv(out, rows); };
  } else if (config.command == "stability") {
    std::vector<StabilityRow> rows;
    code = stability(config, s, log, rows);
    body = [rows](std::ostream& out) { write_stability_csv(out, rows); };
  } else if (config.command == "expm-bench") {
    std::vector<KernelBenchRow> rows;
    expm_bench(config, s, log, rows);
    body = [rows](std::ostream& out) { write_kernel_csv(out, rows); };
  } else {
    log << "error: unknown command '" << config.command << "'\n";
    return kExitUsage;
  }
  if (!write_file(path, body, log)) return kExitUsage;
  return code;
}

}  // namespace stiffsim
