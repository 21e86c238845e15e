#pragma once

// Intrinsic triangulated surfaces: combinatorics plus reference edge lengths,
// and conformal states u over them with induced lengths
// l_ij = exp(u_i + u_j) l0_ij.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lefschetz {

using Triangle = std::array<int, 3>;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeshParseError : public MeshError {
 public:
  MeshParseError(int line, const std::string& what)
      : MeshError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Raised when induced lengths violate the strict triangle inequality.
class InvalidStateError : public MeshError {
 public:
  InvalidStateError(int triangle, const std::string& what)
      : MeshError(what), triangle_(triangle) {}
  int triangle() const { return triangle_; }

 private:
  int triangle_;
};

/// Closed oriented triangulated surface with reference edge lengths.
///
/// Edges are derived from the triangles (vertex pairs, smaller index first).
/// Construction accepts non-manifold or non-orientable input so that
/// validate() can report on it; the geometric routines assume a surface that
/// passed validation.
class TriSurface {
 public:
  struct EdgeSide {
    int triangle = -1;
    int corner = -1;  // corner of `triangle` opposite the edge
  };

  TriSurface(int num_vertices, std::vector<Triangle> triangles,
             const std::vector<std::pair<std::array<int, 2>, double>>& lengths);

  /// Every edge gets the same length; handy for equilateral constructions.
  static TriSurface uniform(int num_vertices, std::vector<Triangle> triangles,
                            double length = 1.0);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }

  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const Eigen::VectorXd& reference_lengths() const { return reference_lengths_; }

  /// Edge index of the triangle side opposite `corner`.
  int triangle_edge(int triangle, int corner) const {
    return triangle_edges_[static_cast<std::size_t>(triangle)][static_cast<std::size_t>(corner)];
  }
  const std::vector<EdgeSide>& edge_sides(int edge) const {
    return edge_sides_[static_cast<std::size_t>(edge)];
  }
  std::optional<int> find_edge(int a, int b) const;

 private:
  int num_vertices_ = 0;
  std::vector<Triangle> triangles_;
  std::vector<std::array<int, 2>> edges_;
  Eigen::VectorXd reference_lengths_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::vector<EdgeSide>> edge_sides_;
};

struct Violation {
  enum class Kind { boundary_edge, nonmanifold_edge, orientation, triangle_inequality,
                    disconnected, genus_mismatch };
  Kind kind;
  std::string simplex;  // e.g. "edge 3-7" or "triangle 12 (4,5,9)"
  std::string message;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  bool closed = true;
  bool orientable = true;
  bool triangle_inequality = true;
  bool connected = true;
  int euler_characteristic = 0;
  std::optional<int> genus;  // set when the surface is closed, orientable and connected
  std::vector<Violation> violations;

  bool passed() const { return violations.empty(); }
  std::string summary() const;
};

/// Checks closedness, orientation consistency, connectivity, strict triangle
/// inequality on reference lengths, and (optionally) the declared genus.
ValidationReport validate(const TriSurface& surface, std::optional<int> declared_genus = {});

/// Per-vertex conformal factors over a shared, immutable surface.
struct ConformalState {
  std::shared_ptr<const TriSurface> surface;
  Eigen::VectorXd u;
  double time = 0.0;

  static ConformalState reference(std::shared_ptr<const TriSurface> surface) {
    const int n = surface->num_vertices();
    return ConformalState{std::move(surface), Eigen::VectorXd::Zero(n), 0.0};
  }
};

Eigen::VectorXd induced_lengths(const ConformalState& state);

/// Index of the first triangle violating the strict triangle inequality, if any.
std::optional<int> first_invalid_triangle(const TriSurface& surface,
                                          const Eigen::VectorXd& lengths);
bool is_valid(const ConformalState& state);

/// Angles per triangle corner, row t = (angle at v0, v1, v2). Throws
/// InvalidStateError on a degenerate triangle.
Eigen::MatrixX3d corner_angles(const ConformalState& state);
Eigen::MatrixX3d corner_angles(const TriSurface& surface, const Eigen::VectorXd& lengths);

/// Angle defect K_i = 2 pi - sum of corner angles at i.
Eigen::VectorXd vertex_curvature(const ConformalState& state);
Eigen::VectorXd vertex_curvature(const TriSurface& surface, const Eigen::MatrixX3d& angles);

/// w_e = (cot alpha + cot beta) / 2 over the corners opposite edge e.
Eigen::VectorXd cotan_weights(const TriSurface& surface, const Eigen::MatrixX3d& angles);

/// (L f)_i = sum_j w_ij (f_j - f_i). Symmetric, negative semidefinite when
/// the weights are nonnegative.
Eigen::SparseMatrix<double> cotan_laplacian(const ConformalState& state);
Eigen::SparseMatrix<double> cotan_laplacian(const TriSurface& surface,
                                            const Eigen::VectorXd& weights);

/// Barycentric dual areas A_i = (1/3) sum of incident triangle areas.
Eigen::VectorXd vertex_areas(const ConformalState& state);
Eigen::VectorXd vertex_areas(const TriSurface& surface, const Eigen::VectorXd& lengths);

/// Text mesh format:
///   trisurf <V> <F>
///   tri i j k        (F lines)
///   len i j <float>  (one line per edge, i < j)
TriSurface parse_trisurf(std::istream& in);
TriSurface load_trisurf(const std::string& path);
std::string format_trisurf(const TriSurface& surface);
void save_trisurf(const TriSurface& surface, const std::string& path);

}  // namespace lefschetz
