#pragma once

// Ground truth, local integration error, speed-accuracy and stiffness
// sweeps, stability search and exponential-kernel timing.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stiffsim/contact.hpp"
#include "stiffsim/expm.hpp"
#include "stiffsim/integrators.hpp"
#include "stiffsim/scenarios.hpp"

namespace stiffsim {

constexpr double kGroundTruthDt = 1e-3 / 64.0;  // s
constexpr double kDivergenceSpeed = 1e3;        // bound on |v|_inf

// Number of steps of size dt in one control period; throws
// std::invalid_argument unless dt divides dt_c.
int steps_per_tick(double dt_c, double dt);

// Simulation context at a control tick and the input applied from it.
struct Snapshot {
  double t = 0.0;
  RobotState state;
  std::vector<ContactPointState> contacts;
  Eigen::VectorXd tau;
};

struct GroundTruth {
  IntegratorSetup setup;
  double dt = kGroundTruthDt;
  std::vector<Snapshot> ticks;  // ticks[0] is the initial state
};

// Runs the scenario with the given integrator at dt and records every
// control tick. Throws GroundTruthDivergedError if the run leaves the
// bounded region.
GroundTruth ground_truth(const Scenario& scenario, const IntegratorSetup& setup,
                         double dt = kGroundTruthDt);

// Advances `steps` steps of dt with a constant input. Returns false as soon
// as the state is non-finite or |v|_inf reaches kDivergenceSpeed.
bool advance(const Scenario& scenario, const IntegratorSetup& setup,
             RobotState& x, std::vector<ContactPointState>& contacts,
             const Eigen::VectorXd& tau, double dt, int steps);

struct LocalError {
  std::vector<double> times;   // tick times t
  std::vector<double> errors;  // e(t), +inf for diverged sub-runs
  double mean = 0.0;
  double max = 0.0;
  std::int64_t steps = 0;
  std::int64_t wall_ns = 0;
};

// e(t) = |x(t) (-) xhat(t; t - dt_c, x(t - dt_c))|_inf at every
// tick_stride-th tick, restarting each sub-run from the ground truth.
LocalError local_error(const Scenario& scenario, const GroundTruth& truth,
                       const IntegratorSetup& setup, double dt,
                       int tick_stride = 1);

struct BenchRecord {
  std::string scenario;
  std::string integrator;
  std::string mmm;  // "full", "0".."4", or "-" for non-exponential methods
  double dt_ms = 0.0;
  double dt_c_ms = 0.0;
  double stiffness = 0.0;
  double damping = 0.0;
  double mu = 0.0;
  double err_mean = 0.0;
  double err_max = 0.0;
  double ns_per_step = 0.0;
  double realtime_factor = 0.0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

// Local error and timing for one integrator and step; wall time is the
// median of `repetitions` timed local-error passes after one untimed pass.
// A diverged ground truth yields infinite errors and zero timing.
BenchRecord measure(const Scenario& scenario, const IntegratorSetup& setup,
                    double dt, int repetitions,
                    const GroundTruth* truth = nullptr);

// True for a record whose ground truth diverged.
bool truth_diverged(const BenchRecord& r);

// dt_c, dt_c / 2, ... down to the smallest value not below 1/8 ms.
std::vector<double> halving_grid(double dt_c, double smallest = 1.25e-4);

std::vector<BenchRecord> speed_accuracy_sweep(
    const Scenario& scenario, const std::vector<IntegratorSetup>& setups,
    const std::vector<double>& dts, int repetitions = 3);

// K sweep with B = 2 xi sqrt(K) at fixed xi = xi_fixed, then a xi sweep at
// K = k_fixed. Either grid may be empty.
std::vector<BenchRecord> stiffness_damping_sweep(
    const std::string& scenario, const ScenarioOverrides& base,
    const IntegratorSetup& setup, double dt, const std::vector<double>& k_grid,
    double xi_fixed, const std::vector<double>& xi_grid, double k_fixed,
    int repetitions = 3);

struct StabilityResult {
  std::vector<double> dts;  // ascending
  std::vector<bool> stable;
  double max_stable_dt = 0.0;  // 0 when nothing is stable
  bool monotone = true;        // stable at dt implies stable below dt
};

// Whole scenario without resets; stable iff |v|_inf < kDivergenceSpeed and
// the state stays finite throughout.
bool run_is_stable(const Scenario& scenario, const IntegratorSetup& setup,
                   double dt);

StabilityResult stability_search(const Scenario& scenario,
                                 const IntegratorSetup& setup,
                                 std::vector<double> dts);

// Contact linear systems met by a full-policy expo run of the scenario.
struct KernelSample {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd x0;
};

std::vector<KernelSample> collect_kernel_samples(const Scenario& scenario,
                                                 double dt, int max_samples);

struct KernelBenchRow {
  std::string scenario;
  std::string policy;
  int order = 0;
  double dt_ms = 0.0;
  int samples = 0;
  double ns_per_call = 0.0;
  double rel_err_mean = 0.0;  // against the full policy
  double rel_err_max = 0.0;

  friend bool operator==(const KernelBenchRow&,
                         const KernelBenchRow&) = default;
};

// Error of each policy against the full one and time per compute_integrals
// call: the mean over samples of the median over repetitions.
std::vector<KernelBenchRow> kernel_benchmark(
    const std::string& scenario_name, const std::vector<KernelSample>& samples,
    const std::vector<PadePolicy>& policies, double dt, int repetitions);

}  // namespace stiffsim
