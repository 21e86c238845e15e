#pragma once

// Normalized discrete Ricci flow du_i/dt = k*_i - K_i on one fiber, and the
// maximum-principle monitors evaluated along it.

#include "lefschetz/mesh.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lefschetz {

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public FlowError {
 public:
  SolverError(double residual, const std::string& what) : FlowError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class FitError : public FlowError {
 public:
  using FlowError::FlowError;
};

struct TargetCurvature {
  Eigen::VectorXd k_star;  // 2 pi chi / V at every vertex
  double k_smooth = 0.0;   // 2 pi chi / area

  static TargetCurvature uniform(const ConformalState& state);
};

enum class StepRule { explicit_euler, rk4, adaptive };

std::string to_string(StepRule rule);
StepRule parse_step_rule(const std::string& name);

struct FlowConfig {
  double dt_init = 0.01;
  double dt_max = 0.1;
  double tol = 1e-8;
  double t_max = 200.0;
  StepRule step_rule = StepRule::adaptive;
  int monitor_every = 1;
  /// Smallest step the halving retry may reach before the state is declared
  /// degenerate.
  double dt_floor = 1e-10;
  /// Adaptive steps never exceed safety / (2 max_i sum_j |w_ij|), the step at
  /// which the explicit update stops being a convex combination of neighbors.
  double stability_safety = 0.9;

  /// Throws FlowError when an invariant fails (dt_init <= dt_max, tol > 0, ...).
  void check() const;
};

struct TraceSample {
  double t = 0;
  double max_dev = 0;
  double min_dev = 0;
  double sup_dev = 0;
  double h_max = 0;
  double grad_norm = 0;
  double area = 0;
};

enum class Termination { converged, time_cap, degenerate };

std::string to_string(Termination t);

struct FlowTrace {
  std::vector<TraceSample> samples;
  Termination terminated = Termination::time_cap;
  /// Decay rate of sup|K - k*| over the second half of the run; NaN when the
  /// window holds too few samples for a fit.
  double fitted_rate = 0;
  double fitted_r2 = 0;
  std::size_t steps = 0;
};

class DegenerateStateError : public FlowError {
 public:
  DegenerateStateError(const std::string& what, FlowTrace partial = {})
      : FlowError(what), partial_(std::move(partial)) {}
  const FlowTrace& partial_trace() const { return partial_; }

 private:
  FlowTrace partial_;
};

/// Right-hand side k* - K(u).
Eigen::VectorXd flow_velocity(const ConformalState& state, const TargetCurvature& target);

/// One step of `rule` (explicit Euler or RK4; adaptive uses Euler). When the
/// stepped state is invalid the step is retried with dt/2 until dt drops
/// below `dt_floor`, then DegenerateStateError. The returned state's time
/// reflects the dt actually taken.
ConformalState flow_step(const ConformalState& state, const TargetCurvature& target, double dt,
                         StepRule rule = StepRule::explicit_euler, double dt_floor = 1e-10);

/// Largest dt for which one explicit step is a convex combination at every
/// vertex of the linearized curvature evolution.
double stability_limit(const ConformalState& state);

/// Flows until sup|K - k*| < tol or t >= t_max. Samples at t = 0, every
/// `monitor_every` accepted steps, and at termination.
struct FlowResult {
  ConformalState state;
  FlowTrace trace;
};
FlowResult run_flow(const ConformalState& state0, const TargetCurvature& target,
                    const FlowConfig& cfg);

/// Solves L Phi = k* - K with sum_i Phi_i A_i = 0 by conjugate gradients
/// projected onto the complement of the constants.
Eigen::VectorXd poisson_potential(const ConformalState& state, const TargetCurvature& target);

struct HMonitor {
  Eigen::VectorXd h;
  double h_max = 0;
};

/// H_i = (K_i - k*_i) + 2 |grad Phi|^2_i with the cotan-weighted Dirichlet
/// density |grad Phi|^2_i = sum_j w_ij (Phi_i - Phi_j)^2 / (2 A_i).
HMonitor h_monitor(const ConformalState& state, const TargetCurvature& target);

/// max over edges of |K_i - K_j|^2 / l_ij^2.
double curvature_gradient_norm(const ConformalState& state, const TargetCurvature& target);

TraceSample sample_state(const ConformalState& state, const TargetCurvature& target);

enum class TraceQuantity { supdev, hmax, gradnorm };

struct DecayFit {
  double rate = 0;
  double r2 = 0;
  double c0 = 0;
  /// log q is constant over the window, so r2 is undefined (reported NaN).
  bool degenerate = false;
};

/// Least squares log q(t) ~ log c0 + rate t over samples with t in
/// [t_lo, t_hi]. Needs at least 10 samples there, all with q > 0.
DecayFit fit_decay_rate(const FlowTrace& trace, TraceQuantity quantity, double t_lo, double t_hi);

/// The same fit on raw (t, q) pairs.
DecayFit fit_exponential(const std::vector<double>& t, const std::vector<double>& q);

/// The default fit window: the second half of the sampled time span.
std::pair<double, double> trailing_window(const FlowTrace& trace);

double trace_value(const TraceSample& s, TraceQuantity quantity);

/// CSV with header t,max_dev,min_dev,sup_dev,h_max,grad_norm,area and
/// 17 significant digits per value.
void write_trace_csv(std::ostream& out, const FlowTrace& trace);
std::string trace_csv(const FlowTrace& trace);

}  // namespace lefschetz
