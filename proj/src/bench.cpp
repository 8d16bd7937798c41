#include "stiffsim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stiffsim/errors.hpp"

namespace stiffsim {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() -
                                                              since)
      .count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

BenchRecord record_header(const Scenario& s, const IntegratorSetup& setup,
                          double dt) {
  BenchRecord r;
  r.scenario = s.name;
  r.integrator = to_string(setup.kind);
  r.mmm = setup.kind == IntegratorKind::kExpo ? setup.policy.name() : "-";
  r.dt_ms = dt * 1e3;
  r.dt_c_ms = s.dt_c * 1e3;
  r.stiffness = s.contact.stiffness.z();
  r.damping = s.contact.damping.z();
  r.mu = s.contact.mu;
  return r;
}

}  // namespace

int steps_per_tick(double dt_c, double dt) {
  if (!(dt > 0) || !(dt_c > 0)) {
    throw std::invalid_argument("time steps must be positive");
  }
  const double ratio = dt_c / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("dt must divide dt_c");
  }
  return int(n);
}

bool advance(const Scenario& scenario, const IntegratorSetup& setup,
             RobotState& x, std::vector<ContactPointState>& contacts,
             const Eigen::VectorXd& tau, double dt, int steps) {
  for (int i = 0; i < steps; ++i) {
    try {
      x = step(setup, *scenario.model, contacts, x, tau, dt).state;
    } catch (const IntegrationDivergedError&) {
      return false;
    }
    if (!(x.v.cwiseAbs().maxCoeff() < kDivergenceSpeed)) return false;
  }
  return true;
}

GroundTruth ground_truth(const Scenario& scenario, const IntegratorSetup& setup,
                         double dt) {
  const int steps = steps_per_tick(scenario.dt_c, dt);
  GroundTruth gt;
  gt.setup = setup;
  gt.dt = dt;
  Snapshot snap;
  snap.state = scenario.initial;
  snap.contacts = scenario.initial_contacts();
  snap.tau = scenario.control(snap.state, 0.0);
  gt.ticks.push_back(snap);
  const int n = scenario.ticks();
  for (int k = 1; k <= n; ++k) {
    if (!advance(scenario, setup, snap.state, snap.contacts, snap.tau, dt,
                 steps)) {
      throw GroundTruthDivergedError(
          "ground truth of " + scenario.name + " with " + setup.label() +
          " diverged before t = " + std::to_string(k * scenario.dt_c) + " s");
    }
    snap.t = k * scenario.dt_c;
    snap.tau = scenario.control(snap.state, snap.t);
    gt.ticks.push_back(snap);
  }
  return gt;
}

LocalError local_error(const Scenario& scenario, const GroundTruth& truth,
                       const IntegratorSetup& setup, double dt,
                       int tick_stride) {
  if (tick_stride < 1) throw std::invalid_argument("tick_stride must be >= 1");
  const int steps = steps_per_tick(scenario.dt_c, dt);
  LocalError out;
  const auto start = Clock::now();
  for (std::size_t k = tick_stride; k < truth.ticks.size(); k += tick_stride) {
    const Snapshot& from = truth.ticks[k - 1];
    RobotState x = from.state;
    std::vector<ContactPointState> contacts = from.contacts;
    double e = kInf;
    if (advance(scenario, setup, x, contacts, from.tau, dt, steps)) {
      e = scenario.model->state_difference(x, truth.ticks[k].state)
              .cwiseAbs()
              .maxCoeff();
      if (!std::isfinite(e)) e = kInf;
    }
    out.steps += steps;
    out.times.push_back(truth.ticks[k].t);
    out.errors.push_back(e);
  }
  out.wall_ns = elapsed_ns(start);
  if (!out.errors.empty()) {
    double sum = 0.0;
    for (double e : out.errors) {
      sum += e;
      out.max = std::max(out.max, e);
    }
    out.mean = sum / double(out.errors.size());
  }
  return out;
}

BenchRecord measure(const Scenario& scenario, const IntegratorSetup& setup,
                    double dt, int repetitions, const GroundTruth* truth) {
  BenchRecord r = record_header(scenario, setup, dt);
  GroundTruth own;
  if (!truth) {
    try {
      own = ground_truth(scenario, setup);
    } catch (const GroundTruthDivergedError&) {
      r.err_mean = r.err_max = kInf;
      return r;
    }
    truth = &own;
  }
  const LocalError first = local_error(scenario, *truth, setup, dt);
  std::vector<double> walls;
  for (int i = 0; i < repetitions; ++i) {
    walls.push_back(double(local_error(scenario, *truth, setup, dt).wall_ns));
  }
  if (walls.empty()) walls.push_back(double(first.wall_ns));
  const double wall = median(walls);
  r.err_mean = first.mean;
  r.err_max = first.max;
  if (first.steps > 0 && wall > 0) {
    r.ns_per_step = wall / double(first.steps);
    r.realtime_factor = double(first.steps) * dt / (wall * 1e-9);
  }
  return r;
}

bool truth_diverged(const BenchRecord& r) {
  return std::isinf(r.err_mean) && r.ns_per_step == 0.0;
}

std::vector<double> halving_grid(double dt_c, double smallest) {
  std::vector<double> grid;
  for (double dt = dt_c; dt >= smallest * (1 - 1e-12); dt *= 0.5) {
    grid.push_back(dt);
  }
  std::reverse(grid.begin(), grid.end());
  return grid;
}

std::vector<BenchRecord> speed_accuracy_sweep(
    const Scenario& scenario, const std::vector<IntegratorSetup>& setups,
    const std::vector<double>& dts, int repetitions) {
  for (double dt : dts) steps_per_tick(scenario.dt_c, dt);
  std::vector<BenchRecord> out;
  for (const IntegratorSetup& setup : setups) {
    GroundTruth truth;
    bool truth_ok = true;
    try {
      truth = ground_truth(scenario, setup);
    } catch (const GroundTruthDivergedError&) {
      truth_ok = false;
    }
    for (double dt : dts) {
      if (truth_ok) {
        out.push_back(measure(scenario, setup, dt, repetitions, &truth));
      } else {
        BenchRecord r = record_header(scenario, setup, dt);
        r.err_mean = r.err_max = kInf;
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<BenchRecord> stiffness_damping_sweep(
    const std::string& scenario, const ScenarioOverrides& base,
    const IntegratorSetup& setup, double dt, const std::vector<double>& k_grid,
    double xi_fixed, const std::vector<double>& xi_grid, double k_fixed,
    int repetitions) {
  auto run = [&](double k, double xi) {
    ScenarioOverrides o = base;
    o.stiffness = k;
    o.damping.reset();
    o.damping_ratio = xi;
    return measure(make_scenario(scenario, o), setup, dt, repetitions);
  };
  std::vector<BenchRecord> out;
  for (double k : k_grid) out.push_back(run(k, xi_fixed));
  for (double xi : xi_grid) out.push_back(run(k_fixed, xi));
  return out;
}

bool run_is_stable(const Scenario& scenario, const IntegratorSetup& setup,
                   double dt) {
  const int steps = steps_per_tick(scenario.dt_c, dt);
  RobotState x = scenario.initial;
  std::vector<ContactPointState> contacts = scenario.initial_contacts();
  const int n = scenario.ticks();
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd tau = scenario.control(x, k * scenario.dt_c);
    if (!advance(scenario, setup, x, contacts, tau, dt, steps)) return false;
  }
  return x.q.allFinite();
}

StabilityResult stability_search(const Scenario& scenario,
                                 const IntegratorSetup& setup,
                                 std::vector<double> dts) {
  std::sort(dts.begin(), dts.end());
  StabilityResult r;
  r.dts = dts;
  for (double dt : dts) {
    const bool ok = run_is_stable(scenario, setup, dt);
    r.stable.push_back(ok);
    if (ok) r.max_stable_dt = dt;
  }
  bool seen_unstable = false;
  for (bool ok : r.stable) {
    if (!ok) seen_unstable = true;
    if (ok && seen_unstable) r.monotone = false;
  }
  return r;
}

std::vector<KernelSample> collect_kernel_samples(const Scenario& scenario,
                                                 double dt, int max_samples) {
  const int steps = steps_per_tick(scenario.dt_c, dt);
  const IntegratorSetup setup{IntegratorKind::kExpo, PadePolicy::full()};
  RobotState x = scenario.initial;
  std::vector<ContactPointState> contacts = scenario.initial_contacts();
  std::vector<KernelSample> all;
  const int n = scenario.ticks();
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd tau = scenario.control(x, k * scenario.dt_c);
    for (int i = 0; i < steps; ++i) {
      std::vector<ContactPointState> probe = contacts;
      detect_and_update(*scenario.model, x.q, x.v, probe);
      if (std::any_of(probe.begin(), probe.end(),
                      [](const ContactPointState& c) { return c.active; })) {
        const ContactLds lds = build_contact_lds(*scenario.model, probe, x, tau);
        all.push_back({lds.a, lds.b, lds.x0});
      }
      if (!advance(scenario, setup, x, contacts, tau, dt, 1)) {
        throw IntegrationDivergedError("kernel sample run diverged");
      }
    }
  }
  if (max_samples <= 0 || int(all.size()) <= max_samples) return all;
  std::vector<KernelSample> picked;
  for (int i = 0; i < max_samples; ++i) {
    picked.push_back(all[std::size_t(i) * all.size() / max_samples]);
  }
  return picked;
}

std::vector<KernelBenchRow> kernel_benchmark(
    const std::string& scenario_name, const std::vector<KernelSample>& samples,
    const std::vector<PadePolicy>& policies, double dt, int repetitions) {
  if (samples.empty()) throw std::invalid_argument("no kernel samples");
  std::vector<ExpIntegrals> reference;
  for (const auto& s : samples) {
    reference.push_back(compute_integrals(s.a, s.b, s.x0, dt));
  }

  std::vector<KernelBenchRow> rows;
  for (const PadePolicy& p : policies) {
    KernelBenchRow row;
    row.scenario = scenario_name;
    row.policy = p.name();
    row.order = p.order();
    row.dt_ms = dt * 1e3;
    row.samples = int(samples.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      const ExpIntegrals got = compute_integrals(s.a, s.b, s.x0, dt, p);
      const double num = std::hypot((got.x_int - reference[i].x_int).norm(),
                                    (got.x_int2 - reference[i].x_int2).norm());
      const double den =
          std::hypot(reference[i].x_int.norm(), reference[i].x_int2.norm());
      const double e = den > 0 ? num / den : num;
      sum += e;
      row.rel_err_max = std::max(row.rel_err_max, e);
    }
    row.rel_err_mean = sum / double(samples.size());
    rows.push_back(row);
  }

  // Each call is timed on its own and policies are interleaved per sample,
  // so a preemption inflates one call of one policy. ns_per_call sums the
  // per-sample medians over repetitions. Repetition 0 is a warm-up.
  const std::size_t n = samples.size();
  std::vector<std::vector<std::vector<double>>> times(
      policies.size(), std::vector<std::vector<double>>(n));
  volatile double sink = 0.0;
  for (int rep = 0; rep <= std::max(1, repetitions); ++rep) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = samples[i];
      for (std::size_t j = 0; j < policies.size(); ++j) {
        const auto start = Clock::now();
        const double x = compute_integrals(s.a, s.b, s.x0, dt, policies[j]).x_int(0);
        const double ns = double(elapsed_ns(start));
        sink = sink + x;
        if (rep > 0) times[j][i].push_back(ns);
      }
    }
  }
  for (std::size_t j = 0; j < policies.size(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += median(times[j][i]);
    rows[j].ns_per_call = total / double(n);
  }
  return rows;
}

}  // namespace stiffsim
