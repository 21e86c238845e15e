#include "lefschetz/fibered.hpp"

#include "lefschetz/surfaces.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <thread>

namespace lefschetz {

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::loop: return "loop";
    case BaseKind::disk_grid: return "disk-grid";
    case BaseKind::sphere_mesh: return "sphere-mesh";
  }
  return "unknown";
}

BaseKind parse_base_kind(const std::string& name) {
  if (name == "loop") return BaseKind::loop;
  if (name == "disk-grid") return BaseKind::disk_grid;
  if (name == "sphere-mesh") return BaseKind::sphere_mesh;
  throw FlowError("unknown base kind '" + name + "' (expected loop, disk-grid or sphere-mesh)");
}

double BaseSample::distance(int p, int q) const {
  return (points[static_cast<std::size_t>(p)] - points[static_cast<std::size_t>(q)]).norm();
}

BaseSample BaseSample::loop(int n) {
  if (n < 3) throw FlowError("a loop base needs at least 3 samples");
  BaseSample b;
  b.kind = BaseKind::loop;
  for (int p = 0; p < n; ++p) {
    const double theta = 2.0 * std::numbers::pi * p / (n - 1);
    b.points.emplace_back(std::cos(theta), std::sin(theta), 0.0);
    if (p + 1 < n) b.adjacency.push_back({p, p + 1});
  }
  // The closing point is the start point: make it bit-identical.
  b.points.back() = b.points.front();
  return b;
}

BaseSample BaseSample::disk_grid(int n) {
  if (n < 2) throw FlowError("a disk grid needs n >= 2");
  BaseSample b;
  b.kind = BaseKind::disk_grid;
  std::map<std::pair<int, int>, int> index;
  const double h = 2.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -1.0 + h * i;
      const double y = -1.0 + h * j;
      if (x * x + y * y > 1.0 + 1e-12) continue;
      index[{i, j}] = static_cast<int>(b.points.size());
      b.points.emplace_back(x, y, 0.0);
    }
  }
  for (const auto& [ij, p] : index) {
    for (auto nb : {std::pair{ij.first + 1, ij.second}, std::pair{ij.first, ij.second + 1}}) {
      auto it = index.find(nb);
      if (it != index.end()) b.adjacency.push_back({p, it->second});
    }
  }
  return b;
}

BaseSample BaseSample::sphere_mesh(int subdivisions) {
  // Only the combinatorics of the icosphere are used; positions come from
  // relaxing midpoints of the icosahedron onto the sphere.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> pos = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                                      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                                      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<Triangle> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = mid.emplace(key, static_cast<int>(pos.size()));
      if (inserted) pos.push_back(0.5 * (pos[static_cast<std::size_t>(a)] + pos[static_cast<std::size_t>(b)]));
      return it->second;
    };
    std::vector<Triangle> next;
    for (const auto& t : tris) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  BaseSample b;
  b.kind = BaseKind::sphere_mesh;
  for (const auto& p : pos) b.points.push_back(p.normalized());
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& t : tris) {
    for (int c = 0; c < 3; ++c) {
      auto key = std::minmax(t[static_cast<std::size_t>(c)], t[static_cast<std::size_t>((c + 1) % 3)]);
      if (seen.emplace(key, true).second) b.adjacency.push_back({key.first, key.second});
    }
  }
  return b;
}

void BaseSample::check() const {
  const int n = size();
  if (n == 0) throw FlowError("empty base sample");
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (const auto& e : adjacency) {
    if (e[0] < 0 || e[1] < 0 || e[0] >= n || e[1] >= n) throw FlowError("base adjacency index out of range");
    parent[static_cast<std::size_t>(find(e[0]))] = find(e[1]);
  }
  for (int i = 1; i < n; ++i) {
    if (find(i) != find(0)) throw FlowError("base adjacency graph is disconnected");
  }
  if (kind == BaseKind::loop) {
    if (static_cast<int>(adjacency.size()) != n - 1) throw FlowError("loop base must be a single path");
    for (int p = 0; p + 1 < n; ++p) {
      const auto& e = adjacency[static_cast<std::size_t>(p)];
      if (e[0] != p || e[1] != p + 1) throw FlowError("loop base must be the path 0-1-...-(N-1)");
    }
    if (points.front() != points.back()) throw FlowError("loop base does not close up");
  }
}

// ---------------------------------------------------------------------------
// Families

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd dense_stiffness(const ConformalState& state) {
  return -Eigen::MatrixXd(cotan_laplacian(state));
}

}  // namespace

Eigen::VectorXd low_frequency_field(const TriSurface& surface, std::uint64_t seed, int modes) {
  auto shared = std::make_shared<const TriSurface>(surface);
  const ConformalState ref = ConformalState::reference(shared);
  const Eigen::MatrixXd stiffness = dense_stiffness(ref);
  const Eigen::MatrixXd mass = vertex_areas(ref).asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness, mass);
  if (eig.info() != Eigen::Success) throw FlowError("eigensolver failed on the reference surface");

  const int n = surface.num_vertices();
  modes = std::min(modes, n - 1);
  std::mt19937_64 rng(seed);
  Eigen::VectorXd field = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= modes; ++k) field += (2.0 * unit_uniform(rng) - 1.0) * eig.eigenvectors().col(k);
  const double sup = field.cwiseAbs().maxCoeff();
  if (sup > 0) field /= sup;
  return field;
}

FiberFamily make_family(std::shared_ptr<const TriSurface> surface, const BaseSample& base,
                        double amplitude, std::uint64_t seed) {
  if (amplitude < 0) throw FlowError("amplitude must be nonnegative");
  base.check();
  const int dims = base.kind == BaseKind::sphere_mesh ? 3 : 2;

  std::vector<Eigen::VectorXd> fields;
  for (int k = 0; k < dims; ++k) {
    fields.push_back(low_frequency_field(*surface, seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k) + 1));
  }

  FiberFamily family;
  family.base = base;
  family.surface = surface;
  family.amplitude = amplitude;
  family.seed = seed;
  const double scale = amplitude / std::sqrt(static_cast<double>(dims));
  for (const auto& x : base.points) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(surface->num_vertices());
    for (int k = 0; k < dims; ++k) u += (scale * x(k)) * fields[static_cast<std::size_t>(k)];
    family.states.push_back(ConformalState{surface, std::move(u), 0.0});
  }
  return family;
}

FiberFamily run_family(FiberFamily family, const FlowConfig& cfg, unsigned threads) {
  cfg.check();
  const std::size_t n = family.states.size();
  for (std::size_t p = 0; p < n; ++p) {
    if (!is_valid(family.states[p])) {
      throw FiberError(static_cast<int>(p), "initial state violates the triangle inequality");
    }
  }

  std::vector<std::optional<FlowResult>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t p = next++; p < n; p = next++) {
      try {
        const TargetCurvature target = TargetCurvature::uniform(family.states[p]);
        results[p] = run_flow(family.states[p], target, cfg);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t p = 0; p < n; ++p) {
    if (!errors[p]) continue;
    try {
      std::rethrow_exception(errors[p]);
    } catch (const std::exception& e) {
      throw FiberError(static_cast<int>(p), e.what());
    }
  }

  family.traces.clear();
  for (std::size_t p = 0; p < n; ++p) {
    family.states[p] = std::move(results[p]->state);
    family.traces.push_back(std::move(results[p]->trace));
  }
  return family;
}

// ---------------------------------------------------------------------------
// Envelope

namespace {

void require_converged(const FiberFamily& family) {
  if (family.traces.size() != family.states.size() || family.traces.empty()) {
    throw FlowError("family has not been run");
  }
  for (std::size_t p = 0; p < family.traces.size(); ++p) {
    if (family.traces[p].terminated != Termination::converged) {
      throw FiberError(static_cast<int>(p), "fiber did not converge (" + to_string(family.traces[p].terminated) + ")");
    }
  }
}

// Piecewise-linear interpolation of log sup|K - k*| at time t.
double log_dev_at(const FlowTrace& trace, double t) {
  const auto& s = trace.samples;
  auto value = [](const TraceSample& x) { return std::log(std::max(x.sup_dev, 1e-300)); };
  if (t <= s.front().t) return value(s.front());
  if (t >= s.back().t) return value(s.back());
  auto hi = std::upper_bound(s.begin(), s.end(), t, [](double v, const TraceSample& x) { return v < x.t; });
  auto lo = hi - 1;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return (1.0 - w) * value(*lo) + w * value(*hi);
}

}  // namespace

EnvelopeFit uniform_envelope(const FiberFamily& family, int grid_points) {
  require_converged(family);
  if (grid_points < 20) throw FitError("envelope grid needs at least 20 points");
  double t_end = std::numeric_limits<double>::infinity();
  for (const auto& tr : family.traces) t_end = std::min(t_end, tr.samples.back().t);
  if (!(t_end > 0)) throw FitError("a fiber converged at t = 0; no envelope to fit");

  EnvelopeFit fit;
  fit.t_lo = 0.5 * t_end;
  fit.t_hi = t_end;
  std::vector<double> t, e;
  for (int g = 0; g < grid_points; ++g) {
    const double tg = t_end * g / (grid_points - 1);
    if (tg < fit.t_lo) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& tr : family.traces) worst = std::max(worst, log_dev_at(tr, tg));
    t.push_back(tg);
    e.push_back(std::exp(worst));
  }
  const DecayFit df = fit_exponential(t, e);
  fit.c0 = df.c0;
  fit.rate = df.rate;
  fit.r2 = df.r2;

  fit.worst_ratio = 0;
  for (const auto& tr : family.traces) {
    for (const auto& s : tr.samples) {
      if (s.t < fit.t_lo || s.t > fit.t_hi) continue;
      fit.worst_ratio = std::max(fit.worst_ratio, s.sup_dev / (fit.c0 * std::exp(fit.rate * s.t)));
    }
  }
  fit.bound_holds = fit.worst_ratio <= 1.05;
  return fit;
}

// ---------------------------------------------------------------------------
// Fingerprints

Fingerprint fingerprint(const ConformalState& state, int m) {
  if (m < 1) throw FlowError("fingerprint needs m >= 1");
  const Eigen::VectorXd areas = vertex_areas(state);
  const Eigen::MatrixXd stiffness = dense_stiffness(state);
  const Eigen::MatrixXd mass = areas.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness, mass, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw FlowError("eigensolver failed");
  const int count = std::min<int>(m, static_cast<int>(eig.eigenvalues().size()));
  Fingerprint f;
  f.spectrum = eig.eigenvalues().head(count) * areas.sum();
  return f;
}

LoopContinuity loop_continuity(const FiberFamily& family, int m, double closure_tolerance) {
  if (family.base.kind != BaseKind::loop) throw FlowError("loop_continuity needs a loop base");
  require_converged(family);
  std::vector<Eigen::VectorXd> spectra;
  for (const auto& s : family.states) spectra.push_back(fingerprint(s, m).spectrum);
  LoopContinuity out;
  for (const auto& e : family.base.adjacency) {
    const double gap = (spectra[static_cast<std::size_t>(e[0])] - spectra[static_cast<std::size_t>(e[1])]).cwiseAbs().maxCoeff();
    out.max_gap = std::max(out.max_gap, gap);
  }
  out.closure_gap = (spectra.front() - spectra.back()).cwiseAbs().maxCoeff();
  out.closed = out.closure_gap <= closure_tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// Export

void export_family(const FiberFamily& family, const EnvelopeFit& envelope,
                   const std::vector<Fingerprint>& fingerprints,
                   const std::optional<LoopContinuity>& continuity, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  for (std::size_t p = 0; p < family.traces.size(); ++p) {
    std::ofstream out(fs::path(directory) / ("fiber_" + std::to_string(p) + ".csv"));
    if (!out) throw FlowError("cannot write fiber trace into '" + directory + "'");
    write_trace_csv(out, family.traces[p]);
  }

  nlohmann::ordered_json j;
  j["base_kind"] = to_string(family.base.kind);
  j["base_size"] = family.base.size();
  auto adjacency = nlohmann::json::array();
  for (const auto& e : family.base.adjacency) adjacency.push_back({e[0], e[1]});
  j["adjacency"] = adjacency;
  j["seed"] = family.seed;
  j["amplitude"] = family.amplitude;
  j["envelope"] = {{"c0", envelope.c0},         {"rate", envelope.rate},
                   {"r2", envelope.r2},         {"t_lo", envelope.t_lo},
                   {"t_hi", envelope.t_hi},     {"worst_ratio", envelope.worst_ratio},
                   {"bound_holds", envelope.bound_holds}};
  auto prints = nlohmann::json::array();
  for (const auto& f : fingerprints) {
    prints.push_back(std::vector<double>(f.spectrum.data(), f.spectrum.data() + f.spectrum.size()));
  }
  j["fingerprints"] = prints;
  if (continuity) {
    j["continuity"] = {{"max_gap", continuity->max_gap},
                       {"closure_gap", continuity->closure_gap},
                       {"closed", continuity->closed}};
  }
  std::ofstream out(fs::path(directory) / "family.json");
  if (!out) throw FlowError("cannot write family.json into '" + directory + "'");
  out << j.dump(2) << '\n';
}

}  // namespace lefschetz
