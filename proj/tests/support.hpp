#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, random
// generators, and oracles that recompute library quantities by other means.

#include "lefschetz/fibered.hpp"
#include "lefschetz/mcg.hpp"
#include "lefschetz/meyer.hpp"
#include "lefschetz/surfaces.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace lefschetz::testing {

inline std::string data_path(const std::string& relative) {
  return std::string(LEFSCHETZ_DATA_DIR) + "/" + relative;
}

inline std::shared_ptr<const TriSurface> shared(TriSurface s) {
  return std::make_shared<const TriSurface>(std::move(s));
}

/// Per-vertex i.i.d. uniform conformal factor in [-amplitude, amplitude],
/// redrawn until the induced metric satisfies every triangle inequality.
inline ConformalState random_valid_state(std::shared_ptr<const TriSurface> surface, std::mt19937_64& rng,
                                         double amplitude) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (;;) {
    Eigen::VectorXd u(surface->num_vertices());
    for (auto& x : u) x = dist(rng);
    ConformalState s{surface, u, 0.0};
    if (is_valid(s)) return s;
  }
}

/// Random product of `length` chain transvections with random signs.
inline IntMatrix random_symplectic(const SymplecticSpace& space, std::mt19937_64& rng, int length = 6) {
  const auto chain = words::chain_classes(space.genus);
  std::uniform_int_distribution<std::size_t> pick(0, chain.size() - 1);
  std::bernoulli_distribution coin;
  IntMatrix m = space.identity();
  for (int i = 0; i < length; ++i) {
    const int eps = coin(rng) ? 1 : -1;
    m = (m * transvection<Integer>(space.form, chain[pick(rng)], eps)).eval();
  }
  return m;
}

/// Conjugates every letter of a word by C: the twist along c becomes the
/// twist along C c. Separating letters are unchanged.
inline MonodromyWord conjugate_word(const MonodromyWord& word, const IntMatrix& c) {
  MonodromyWord out = word;
  for (auto& letter : out.letters) {
    if (!letter.curve.is_separating()) letter.curve.homology = (c * letter.curve.homology).eval();
  }
  return out;
}

/// Brute-force Meyer value in floating point: Eigen's LU kernel gives V,
/// the form is symmetrized and diagonalized by a self-adjoint eigensolver.
/// Valid for the small-entry matrices the tests generate.
inline int brute_force_tau(const SymplecticSpace& space, const IntMatrix& a, const IntMatrix& b) {
  const Eigen::Index n = space.dimension();
  auto to_double = [](const IntMatrix& m) {
    Eigen::MatrixXd d(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) d(i, j) = m(i, j).convert_to<double>();
    return d;
  };
  const Eigen::MatrixXd ad = to_double(a), bd = to_double(b), j = to_double(space.form);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a_inv = ad.inverse();
  Eigen::MatrixXd constraint(n, 2 * n);
  constraint << a_inv - id, bd - id;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(constraint);
  lu.setThreshold(1e-9);
  if (lu.rank() == 2 * n) return 0;
  const Eigen::MatrixXd basis = lu.kernel();
  const Eigen::Index k = basis.cols();
  Eigen::MatrixXd q(k, k);
  for (Eigen::Index s = 0; s < k; ++s) {
    for (Eigen::Index t = 0; t < k; ++t) {
      const Eigen::VectorXd x1 = basis.col(s).head(n), y1 = basis.col(s).tail(n);
      const Eigen::VectorXd y2 = basis.col(t).tail(n);
      q(s, t) = (x1 + y1).dot(j * (id - bd) * y2);
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  int sig = 0;
  for (double lambda : eig.eigenvalues()) {
    if (lambda > 1e-8 * scale) ++sig;
    if (lambda < -1e-8 * scale) --sig;
  }
  return sig;
}

/// Corner angles by the law of cosines, independent of the library's
/// atan2/Heron evaluation.
inline double law_of_cosines_angle(double opposite, double b, double c) {
  return std::acos(std::clamp((b * b + c * c - opposite * opposite) / (2 * b * c), -1.0, 1.0));
}

inline double total_curvature(const ConformalState& s) { return vertex_curvature(s).sum(); }

inline double gauss_bonnet_target(const TriSurface& s) {
  return 2 * std::numbers::pi * s.euler_characteristic();
}

/// Flat regular hexagon of 6 unit equilateral triangles around vertex 0, with
/// the planar coordinates of its 7 vertices.
struct HexPatch {
  TriSurface surface;
  Eigen::MatrixX2d xy;
};

inline HexPatch hex_patch() {
  std::vector<Triangle> tris;
  for (int k = 0; k < 6; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 6});
  Eigen::MatrixX2d xy(7, 2);
  xy.row(0) << 0, 0;
  for (int k = 0; k < 6; ++k) xy.row(1 + k) << std::cos(k * std::numbers::pi / 3), std::sin(k * std::numbers::pi / 3);
  return {TriSurface::uniform(7, tris), xy};
}

}  // namespace lefschetz::testing
