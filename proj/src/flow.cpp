#include "lefschetz/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lefschetz {

TargetCurvature TargetCurvature::uniform(const ConformalState& state) {
  const TriSurface& s = *state.surface;
  const double total = 2.0 * std::numbers::pi * s.euler_characteristic();
  TargetCurvature t;
  t.k_star = Eigen::VectorXd::Constant(s.num_vertices(), total / s.num_vertices());
  t.k_smooth = total / vertex_areas(state).sum();
  return t;
}

std::string to_string(StepRule rule) {
  switch (rule) {
    case StepRule::explicit_euler: return "explicit-euler";
    case StepRule::rk4: return "rk4";
    case StepRule::adaptive: return "adaptive";
  }
  return "unknown";
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "explicit-euler") return StepRule::explicit_euler;
  if (name == "rk4") return StepRule::rk4;
  if (name == "adaptive") return StepRule::adaptive;
  throw FlowError("unknown step rule '" + name + "' (expected explicit-euler, rk4 or adaptive)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::time_cap: return "time-cap";
    case Termination::degenerate: return "degenerate";
  }
  return "unknown";
}

void FlowConfig::check() const {
  if (!(dt_init > 0)) throw FlowError("dt_init must be positive");
  if (!(dt_init <= dt_max)) throw FlowError("dt_init must not exceed dt_max");
  if (!(tol > 0)) throw FlowError("tol must be positive");
  if (!(t_max > 0)) throw FlowError("t_max must be positive");
  if (monitor_every < 1) throw FlowError("monitor_every must be >= 1");
  if (!(dt_floor > 0)) throw FlowError("dt_floor must be positive");
  if (!(stability_safety > 0 && stability_safety <= 1)) {
    throw FlowError("stability_safety must lie in (0, 1]");
  }
}

Eigen::VectorXd flow_velocity(const ConformalState& state, const TargetCurvature& target) {
  return target.k_star - vertex_curvature(state);
}

namespace {

ConformalState shifted(const ConformalState& s, const Eigen::VectorXd& du, double dt) {
  return ConformalState{s.surface, s.u + du, s.time + dt};
}

}  // namespace

ConformalState flow_step(const ConformalState& state, const TargetCurvature& target, double dt,
                         StepRule rule, double dt_floor) {
  if (!(dt > 0)) throw FlowError("flow_step needs dt > 0");
  const Eigen::VectorXd k1 = flow_velocity(state, target);
  for (double h = dt; h >= dt_floor; h *= 0.5) {
    try {
      ConformalState next;
      if (rule == StepRule::rk4) {
        const Eigen::VectorXd k2 = flow_velocity(shifted(state, 0.5 * h * k1, 0), target);
        const Eigen::VectorXd k3 = flow_velocity(shifted(state, 0.5 * h * k2, 0), target);
        const Eigen::VectorXd k4 = flow_velocity(shifted(state, h * k3, 0), target);
        next = shifted(state, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), h);
      } else {
        next = shifted(state, h * k1, h);
      }
      if (is_valid(next)) return next;
    } catch (const InvalidStateError&) {
      // an intermediate RK stage left the valid region; retry smaller
    }
  }
  throw DegenerateStateError("step size fell below " + std::to_string(dt_floor) + " at t=" +
                             std::to_string(state.time) +
                             " without producing a valid state (mesh too coarse or dt too large)");
}

double stability_limit(const ConformalState& state) {
  const TriSurface& s = *state.surface;
  const Eigen::VectorXd w = cotan_weights(s, corner_angles(state));
  Eigen::VectorXd row = Eigen::VectorXd::Zero(s.num_vertices());
  for (int e = 0; e < s.num_edges(); ++e) {
    const auto& ij = s.edges()[static_cast<std::size_t>(e)];
    row(ij[0]) += std::abs(w(e));
    row(ij[1]) += std::abs(w(e));
  }
  return 1.0 / (2.0 * row.maxCoeff());
}

FlowResult run_flow(const ConformalState& state0, const TargetCurvature& target,
                    const FlowConfig& cfg) {
  cfg.check();
  if (!is_valid(state0)) throw InvalidStateError(-1, "initial state violates the triangle inequality");

  FlowResult result{state0, {}};
  ConformalState& s = result.state;
  FlowTrace& trace = result.trace;
  trace.samples.push_back(sample_state(s, target));

  const bool adaptive = cfg.step_rule == StepRule::adaptive;
  const StepRule rule = adaptive ? StepRule::explicit_euler : cfg.step_rule;
  double dt = cfg.dt_init;
  int clean = 0;

  while (true) {
    const double sup = (vertex_curvature(s) - target.k_star).cwiseAbs().maxCoeff();
    if (sup < cfg.tol) {
      trace.terminated = Termination::converged;
      break;
    }
    if (s.time >= cfg.t_max) {
      trace.terminated = Termination::time_cap;
      break;
    }

    double dt_try = dt;
    if (adaptive) dt_try = std::min({dt, cfg.dt_max, cfg.stability_safety * stability_limit(s)});

    ConformalState next;
    try {
      next = flow_step(s, target, dt_try, rule, cfg.dt_floor);
    } catch (const DegenerateStateError& e) {
      trace.terminated = Termination::degenerate;
      throw DegenerateStateError(e.what(), trace);
    }
    const double taken = next.time - s.time;
    if (adaptive) {
      if (taken < dt_try) {
        dt = taken;
        clean = 0;
      } else if (++clean >= 10) {
        dt = std::min(dt * 1.2, cfg.dt_max);
        clean = 0;
      }
    }
    s = std::move(next);
    ++trace.steps;
    if (trace.steps % static_cast<std::size_t>(cfg.monitor_every) == 0) {
      trace.samples.push_back(sample_state(s, target));
    }
  }
  if (trace.samples.back().t < s.time) trace.samples.push_back(sample_state(s, target));

  trace.fitted_rate = std::numeric_limits<double>::quiet_NaN();
  trace.fitted_r2 = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto [lo, hi] = trailing_window(trace);
    const DecayFit fit = fit_decay_rate(trace, TraceQuantity::supdev, lo, hi);
    trace.fitted_rate = fit.rate;
    trace.fitted_r2 = fit.r2;
  } catch (const FitError&) {
    // too few samples (e.g. converged at t = 0); rate stays NaN
  }
  return result;
}

// ---------------------------------------------------------------------------
// Monitors

Eigen::VectorXd poisson_potential(const ConformalState& state, const TargetCurvature& target) {
  const TriSurface& s = *state.surface;
  const Eigen::MatrixX3d angles = corner_angles(state);
  const Eigen::VectorXd rhs = target.k_star - vertex_curvature(s, angles);
  const Eigen::SparseMatrix<double> lap = cotan_laplacian(s, cotan_weights(s, angles));
  const Eigen::VectorXd areas = vertex_areas(state);
  const int n = s.num_vertices();

  const double rhs_sup = rhs.cwiseAbs().maxCoeff();
  const double tolerance = 1e-10 * rhs_sup + 1e-12;
  if (rhs_sup == 0.0) return Eigen::VectorXd::Zero(n);

  auto project = [](Eigen::VectorXd& v) { v.array() -= v.mean(); };

  // CG on the positive semidefinite -L restricted to mean-zero vectors.
  Eigen::VectorXd b = -rhs;
  project(b);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const int max_iter = 20 * n;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd ap = -(lap * p);
    project(ap);
    const double pap = p.dot(ap);
    if (!(pap > 0)) break;
    const double alpha = rr / pap;
    phi += alpha * p;
    r -= alpha * ap;
    project(r);
    const double rr_next = r.squaredNorm();
    if (r.cwiseAbs().maxCoeff() < 1e-3 * tolerance) break;
    p = r + (rr_next / rr) * p;
    project(p);
    rr = rr_next;
  }

  phi.array() -= phi.dot(areas) / areas.sum();
  const double residual = (lap * phi - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= tolerance)) {
    throw SolverError(residual, "Poisson solve did not converge: residual " + std::to_string(residual) +
                                    " exceeds " + std::to_string(tolerance));
  }
  return phi;
}

HMonitor h_monitor(const ConformalState& state, const TargetCurvature& target) {
  const TriSurface& s = *state.surface;
  const Eigen::MatrixX3d angles = corner_angles(state);
  const Eigen::VectorXd w = cotan_weights(s, angles);
  const Eigen::VectorXd areas = vertex_areas(state);
  const Eigen::VectorXd phi = poisson_potential(state, target);

  Eigen::VectorXd energy = Eigen::VectorXd::Zero(s.num_vertices());
  for (int e = 0; e < s.num_edges(); ++e) {
    const auto& ij = s.edges()[static_cast<std::size_t>(e)];
    const double d = phi(ij[0]) - phi(ij[1]);
    energy(ij[0]) += w(e) * d * d;
    energy(ij[1]) += w(e) * d * d;
  }
  HMonitor m;
  m.h = (vertex_curvature(s, angles) - target.k_star) + 2.0 * (energy.array() / (2.0 * areas.array())).matrix();
  m.h_max = m.h.maxCoeff();
  return m;
}

double curvature_gradient_norm(const ConformalState& state, const TargetCurvature& target) {
  const TriSurface& s = *state.surface;
  const Eigen::VectorXd dev = vertex_curvature(state) - target.k_star;
  const Eigen::VectorXd len = induced_lengths(state);
  double worst = 0;
  for (int e = 0; e < s.num_edges(); ++e) {
    const auto& ij = s.edges()[static_cast<std::size_t>(e)];
    const double d = (dev(ij[0]) - dev(ij[1])) / len(e);
    worst = std::max(worst, d * d);
  }
  return worst;
}

TraceSample sample_state(const ConformalState& state, const TargetCurvature& target) {
  const Eigen::VectorXd dev = vertex_curvature(state) - target.k_star;
  TraceSample out;
  out.t = state.time;
  out.max_dev = dev.maxCoeff();
  out.min_dev = dev.minCoeff();
  out.sup_dev = std::max(std::abs(out.max_dev), std::abs(out.min_dev));
  out.h_max = h_monitor(state, target).h_max;
  out.grad_norm = curvature_gradient_norm(state, target);
  out.area = vertex_areas(state).sum();
  return out;
}

// ---------------------------------------------------------------------------
// Fits

double trace_value(const TraceSample& s, TraceQuantity quantity) {
  switch (quantity) {
    case TraceQuantity::supdev: return s.sup_dev;
    case TraceQuantity::hmax: return s.h_max;
    case TraceQuantity::gradnorm: return s.grad_norm;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

DecayFit fit_exponential(const std::vector<double>& t, const std::vector<double>& q) {
  if (t.size() != q.size()) throw FitError("time and value series differ in length");
  if (t.size() < 10) throw FitError("need at least 10 samples in the fit window, got " + std::to_string(t.size()));
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(q[k] > 0)) throw FitError("nonpositive value " + std::to_string(q[k]) + " at t=" + std::to_string(t[k]));
    x(i) = t[k];
    y(i) = std::log(q[k]);
  }
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const Eigen::VectorXd dy = y.array() - my;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0)) throw FitError("fit window has no time spread");

  DecayFit fit;
  fit.rate = dx.dot(dy) / sxx;
  const double intercept = my - fit.rate * mx;
  fit.c0 = std::exp(intercept);
  const double ss_tot = dy.squaredNorm();
  const double ss_res = (y - (intercept + fit.rate * x.array()).matrix()).squaredNorm();
  if (ss_tot <= 1e-300 || ss_tot <= 1e-24 * my * my * static_cast<double>(n)) {
    fit.degenerate = true;
    fit.rate = 0;
    fit.c0 = std::exp(my);
    fit.r2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit.r2 = 1.0 - ss_res / ss_tot;
  }
  return fit;
}

DecayFit fit_decay_rate(const FlowTrace& trace, TraceQuantity quantity, double t_lo, double t_hi) {
  std::vector<double> t, q;
  for (const auto& s : trace.samples) {
    if (s.t >= t_lo && s.t <= t_hi) {
      t.push_back(s.t);
      q.push_back(trace_value(s, quantity));
    }
  }
  return fit_exponential(t, q);
}

std::pair<double, double> trailing_window(const FlowTrace& trace) {
  if (trace.samples.empty()) return {0, 0};
  const double end = trace.samples.back().t;
  return {0.5 * end, end};
}

// ---------------------------------------------------------------------------
// Export

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << "t,max_dev,min_dev,sup_dev,h_max,grad_norm,area\n";
  char buf[512];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.max_dev,
                  s.min_dev, s.sup_dev, s.h_max, s.grad_norm, s.area);
    out << buf;
  }
}

std::string trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

}  // namespace lefschetz
