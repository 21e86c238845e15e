#pragma once

// Fiberwise normalized Ricci flow over a sampled base: families of initial
// conformal factors, uniform convergence envelopes and spectral fingerprints
// of the limit metrics.

#include "lefschetz/flow.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lefschetz {

enum class BaseKind { loop, disk_grid, sphere_mesh };

std::string to_string(BaseKind kind);
BaseKind parse_base_kind(const std::string& name);

/// Finite sample of the base surface. Points carry coordinates in R^2 or R^3;
/// the base distance is the Euclidean distance between them. A loop of size N
/// samples the unit circle at angles 2 pi p / (N - 1), so the first and last
/// points coincide and the path 0 - 1 - ... - (N-1) closes into one cycle.
struct BaseSample {
  BaseKind kind = BaseKind::loop;
  std::vector<Eigen::Vector3d> points;
  std::vector<std::array<int, 2>> adjacency;

  int size() const { return static_cast<int>(points.size()); }
  double distance(int p, int q) const;

  static BaseSample loop(int n);
  /// Grid points of spacing 2/(n-1) inside the closed unit disk.
  static BaseSample disk_grid(int n);
  /// Vertices of icosphere(subdivisions) projected to the unit sphere.
  static BaseSample sphere_mesh(int subdivisions);

  /// Throws FlowError unless the adjacency is connected (and, for loops, a
  /// single closed path).
  void check() const;
};

/// Random combination of the lowest nonconstant eigenmodes of the reference
/// surface (generalized problem -L phi = lambda A phi), scaled to sup-norm 1.
/// Deterministic in the seed.
Eigen::VectorXd low_frequency_field(const TriSurface& surface, std::uint64_t seed, int modes = 6);

struct FiberFamily {
  BaseSample base;
  std::shared_ptr<const TriSurface> surface;
  std::vector<ConformalState> states;
  std::vector<FlowTrace> traces;  // filled by run_family
  double amplitude = 0;
  std::uint64_t seed = 0;
};

/// u0(p) = amplitude / sqrt(d) * sum_k x_k(p) F_k, with d the coordinate
/// dimension of the base and F_k independent low-frequency fields, so
/// |u0(p)|_inf <= amplitude and |u0(p) - u0(q)|_inf <= amplitude * d(p, q).
FiberFamily make_family(std::shared_ptr<const TriSurface> surface, const BaseSample& base,
                        double amplitude, std::uint64_t seed);

class FiberError : public FlowError {
 public:
  FiberError(int fiber, const std::string& what)
      : FlowError("fiber " + std::to_string(fiber) + ": " + what), fiber_(fiber) {}
  int fiber() const { return fiber_; }

 private:
  int fiber_;
};

/// Flows every fiber with `cfg`, using up to `threads` workers (0 = hardware
/// concurrency). Results are stored by base index, independent of scheduling.
/// Throws FiberError naming the lowest failing fiber.
FiberFamily run_family(FiberFamily family, const FlowConfig& cfg, unsigned threads = 1);

struct EnvelopeFit {
  double c0 = 0;
  double rate = 0;
  double r2 = 0;
  double t_lo = 0, t_hi = 0;
  /// max over fibers and samples in the window of dev / (c0 e^{rate t}).
  double worst_ratio = 0;
  bool bound_holds = false;  // worst_ratio <= 1.05
};

/// Resamples log sup|K - k*| of every fiber onto a common grid over
/// [0, T] (T = earliest final sample time), takes the fiberwise maximum E(t),
/// and fits one exponential to E on the second half of the grid.
EnvelopeFit uniform_envelope(const FiberFamily& family, int grid_points = 256);

struct Fingerprint {
  Eigen::VectorXd spectrum;  // area-normalized, nondecreasing
};

/// The m smallest eigenvalues of -L phi = lambda A phi times the total area.
Fingerprint fingerprint(const ConformalState& state, int m = 12);

struct LoopContinuity {
  double max_gap = 0;
  double closure_gap = 0;
  bool closed = false;
};

/// Sup-distance between fingerprints of adjacent limit fibers; `closed` when
/// the first and last fiber agree to within `closure_tolerance`.
LoopContinuity loop_continuity(const FiberFamily& family, int m = 12,
                               double closure_tolerance = 1e-6);

/// Writes fiber_<idx>.csv per fiber and family.json into `directory`.
void export_family(const FiberFamily& family, const EnvelopeFit& envelope,
                   const std::vector<Fingerprint>& fingerprints,
                   const std::optional<LoopContinuity>& continuity, const std::string& directory);

}  // namespace lefschetz
