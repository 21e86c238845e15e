#include "lefschetz/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace lefschetz {

namespace {

std::array<int, 2> edge_key(int a, int b) { return a < b ? std::array{a, b} : std::array{b, a}; }

std::string edge_name(const std::array<int, 2>& e) {
  return "edge " + std::to_string(e[0]) + "-" + std::to_string(e[1]);
}

std::string triangle_name(int t, const Triangle& tri) {
  return "triangle " + std::to_string(t) + " (" + std::to_string(tri[0]) + "," +
         std::to_string(tri[1]) + "," + std::to_string(tri[2]) + ")";
}

// 16 A^2 by Heron; nonpositive iff the strict triangle inequality fails.
double heron16(double a, double b, double c) {
  return (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
}

bool strict_triangle(double a, double b, double c) {
  return a > 0 && b > 0 && c > 0 && a < b + c && b < a + c && c < a + b;
}

}  // namespace

TriSurface::TriSurface(int num_vertices, std::vector<Triangle> triangles,
                       const std::vector<std::pair<std::array<int, 2>, double>>& lengths)
    : num_vertices_(num_vertices), triangles_(std::move(triangles)) {
  if (num_vertices_ <= 0) throw MeshError("surface needs at least one vertex");
  std::map<std::array<int, 2>, int> index;
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Triangle& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= num_vertices_) {
        throw MeshError(triangle_name(static_cast<int>(t), tri) + " has vertex out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError(triangle_name(static_cast<int>(t), tri) + " repeats a vertex");
    }
    for (int c = 0; c < 3; ++c) {
      const auto key = edge_key(tri[static_cast<std::size_t>((c + 1) % 3)],
                                tri[static_cast<std::size_t>((c + 2) % 3)]);
      auto [it, inserted] = index.emplace(key, static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back(key);
        edge_sides_.emplace_back();
      }
      triangle_edges_[t][static_cast<std::size_t>(c)] = it->second;
      edge_sides_[static_cast<std::size_t>(it->second)].push_back(
          EdgeSide{static_cast<int>(t), c});
    }
  }

  reference_lengths_ = Eigen::VectorXd::Constant(num_edges(), std::nan(""));
  for (const auto& [pair, len] : lengths) {
    const auto key = edge_key(pair[0], pair[1]);
    auto it = index.find(key);
    if (it == index.end()) throw MeshError("length given for " + edge_name(key) + " not in any triangle");
    double& slot = reference_lengths_(it->second);
    if (!std::isnan(slot)) throw MeshError("duplicate length for " + edge_name(key));
    slot = len;
  }
  for (int e = 0; e < num_edges(); ++e) {
    if (std::isnan(reference_lengths_(e))) {
      throw MeshError("missing length for " + edge_name(edges_[static_cast<std::size_t>(e)]));
    }
  }
}

TriSurface TriSurface::uniform(int num_vertices, std::vector<Triangle> triangles, double length) {
  std::vector<std::pair<std::array<int, 2>, double>> lengths;
  std::map<std::array<int, 2>, bool> seen;
  for (const auto& tri : triangles) {
    for (int c = 0; c < 3; ++c) {
      auto key = edge_key(tri[static_cast<std::size_t>(c)], tri[static_cast<std::size_t>((c + 1) % 3)]);
      if (seen.emplace(key, true).second) lengths.emplace_back(key, length);
    }
  }
  return TriSurface(num_vertices, std::move(triangles), lengths);
}

std::optional<int> TriSurface::find_edge(int a, int b) const {
  auto it = std::find(edges_.begin(), edges_.end(), edge_key(a, b));
  if (it == edges_.end()) return std::nullopt;
  return static_cast<int>(it - edges_.begin());
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::boundary_edge: return "boundary-edge";
    case Violation::Kind::nonmanifold_edge: return "nonmanifold-edge";
    case Violation::Kind::orientation: return "orientation";
    case Violation::Kind::triangle_inequality: return "triangle-inequality";
    case Violation::Kind::disconnected: return "disconnected";
    case Violation::Kind::genus_mismatch: return "genus-mismatch";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << (passed() ? "pass" : "fail") << ": chi=" << euler_characteristic;
  if (genus) out << " genus=" << *genus;
  for (const auto& v : violations) out << "\n  " << to_string(v.kind) << " at " << v.simplex << ": " << v.message;
  return out.str();
}

ValidationReport validate(const TriSurface& surface, std::optional<int> declared_genus) {
  ValidationReport r;
  r.euler_characteristic = surface.euler_characteristic();
  const auto& tris = surface.triangles();

  for (int e = 0; e < surface.num_edges(); ++e) {
    const auto& sides = surface.edge_sides(e);
    const auto& edge = surface.edges()[static_cast<std::size_t>(e)];
    if (sides.size() == 1) {
      r.closed = false;
      r.violations.push_back({Violation::Kind::boundary_edge, edge_name(edge),
                              "edge belongs to one triangle"});
      continue;
    }
    if (sides.size() > 2) {
      r.closed = false;
      r.violations.push_back({Violation::Kind::nonmanifold_edge, edge_name(edge),
                              "edge belongs to " + std::to_string(sides.size()) + " triangles"});
      continue;
    }
    // Directed edge (v[c+1] -> v[c+2]) must run opposite ways in the two triangles.
    auto tail = [&](const TriSurface::EdgeSide& s) {
      return tris[static_cast<std::size_t>(s.triangle)][static_cast<std::size_t>((s.corner + 1) % 3)];
    };
    if (tail(sides[0]) == tail(sides[1])) {
      r.orientable = false;
      r.violations.push_back({Violation::Kind::orientation, edge_name(edge),
                              "triangles " + std::to_string(sides[0].triangle) + " and " +
                                  std::to_string(sides[1].triangle) + " induce the same direction"});
    }
  }

  const Eigen::VectorXd& len = surface.reference_lengths();
  for (int t = 0; t < surface.num_triangles(); ++t) {
    const double a = len(surface.triangle_edge(t, 0));
    const double b = len(surface.triangle_edge(t, 1));
    const double c = len(surface.triangle_edge(t, 2));
    if (!strict_triangle(a, b, c)) {
      r.triangle_inequality = false;
      r.violations.push_back({Violation::Kind::triangle_inequality,
                              triangle_name(t, tris[static_cast<std::size_t>(t)]),
                              "lengths violate the strict triangle inequality"});
    }
  }

  // Connectivity through vertices.
  std::vector<int> parent(static_cast<std::size_t>(surface.num_vertices()));
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& e : surface.edges()) parent[static_cast<std::size_t>(find(e[0]))] = find(e[1]);
  int components = 0;
  for (int v = 0; v < surface.num_vertices(); ++v) components += (find(v) == v);
  if (components != 1) {
    r.connected = false;
    r.violations.push_back({Violation::Kind::disconnected, "surface",
                            std::to_string(components) + " connected components"});
  }

  if (r.closed && r.orientable && r.connected) {
    const int chi = r.euler_characteristic;
    if (chi <= 2 && (2 - chi) % 2 == 0) r.genus = (2 - chi) / 2;
    if (declared_genus && r.genus != declared_genus) {
      r.violations.push_back({Violation::Kind::genus_mismatch, "surface",
                              "chi=" + std::to_string(chi) + " does not match declared genus " +
                                  std::to_string(*declared_genus)});
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Geometry

Eigen::VectorXd induced_lengths(const ConformalState& state) {
  const TriSurface& s = *state.surface;
  Eigen::VectorXd out(s.num_edges());
  for (int e = 0; e < s.num_edges(); ++e) {
    const auto& ij = s.edges()[static_cast<std::size_t>(e)];
    out(e) = std::exp(state.u(ij[0]) + state.u(ij[1])) * s.reference_lengths()(e);
  }
  return out;
}

std::optional<int> first_invalid_triangle(const TriSurface& surface,
                                          const Eigen::VectorXd& lengths) {
  for (int t = 0; t < surface.num_triangles(); ++t) {
    if (!strict_triangle(lengths(surface.triangle_edge(t, 0)), lengths(surface.triangle_edge(t, 1)),
                         lengths(surface.triangle_edge(t, 2)))) {
      return t;
    }
  }
  return std::nullopt;
}

bool is_valid(const ConformalState& state) {
  if (!state.surface || state.u.size() != state.surface->num_vertices()) return false;
  if (!state.u.allFinite()) return false;
  return !first_invalid_triangle(*state.surface, induced_lengths(state)).has_value();
}

Eigen::MatrixX3d corner_angles(const TriSurface& surface, const Eigen::VectorXd& lengths) {
  Eigen::MatrixX3d out(surface.num_triangles(), 3);
  for (int t = 0; t < surface.num_triangles(); ++t) {
    const double a = lengths(surface.triangle_edge(t, 0));
    const double b = lengths(surface.triangle_edge(t, 1));
    const double c = lengths(surface.triangle_edge(t, 2));
    const double h = heron16(a, b, c);
    if (!strict_triangle(a, b, c) || !(h > 0)) {
      throw InvalidStateError(t, "triangle " + std::to_string(t) +
                                     " violates the strict triangle inequality");
    }
    const double four_area = std::sqrt(h);
    out(t, 0) = std::atan2(four_area, b * b + c * c - a * a);
    out(t, 1) = std::atan2(four_area, a * a + c * c - b * b);
    out(t, 2) = std::atan2(four_area, a * a + b * b - c * c);
  }
  return out;
}

Eigen::MatrixX3d corner_angles(const ConformalState& state) {
  return corner_angles(*state.surface, induced_lengths(state));
}

Eigen::VectorXd vertex_curvature(const TriSurface& surface, const Eigen::MatrixX3d& angles) {
  // Extended-precision accumulation keeps the defect of a flat or uniform
  // vertex at the rounding level of a single angle.
  std::vector<long double> sum(static_cast<std::size_t>(surface.num_vertices()), 0.0L);
  for (int t = 0; t < surface.num_triangles(); ++t) {
    const Triangle& tri = surface.triangles()[static_cast<std::size_t>(t)];
    for (int c = 0; c < 3; ++c) sum[static_cast<std::size_t>(tri[static_cast<std::size_t>(c)])] += angles(t, c);
  }
  Eigen::VectorXd k(surface.num_vertices());
  for (int i = 0; i < surface.num_vertices(); ++i) {
    k(i) = static_cast<double>(2.0L * std::numbers::pi_v<long double> - sum[static_cast<std::size_t>(i)]);
  }
  return k;
}

Eigen::VectorXd vertex_curvature(const ConformalState& state) {
  return vertex_curvature(*state.surface, corner_angles(state));
}

Eigen::VectorXd cotan_weights(const TriSurface& surface, const Eigen::MatrixX3d& angles) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(surface.num_edges());
  for (int t = 0; t < surface.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) w(surface.triangle_edge(t, c)) += 0.5 / std::tan(angles(t, c));
  }
  return w;
}

Eigen::SparseMatrix<double> cotan_laplacian(const TriSurface& surface,
                                            const Eigen::VectorXd& weights) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(4 * surface.num_edges()));
  for (int e = 0; e < surface.num_edges(); ++e) {
    const auto& ij = surface.edges()[static_cast<std::size_t>(e)];
    const double w = weights(e);
    entries.emplace_back(ij[0], ij[1], w);
    entries.emplace_back(ij[1], ij[0], w);
    entries.emplace_back(ij[0], ij[0], -w);
    entries.emplace_back(ij[1], ij[1], -w);
  }
  Eigen::SparseMatrix<double> l(surface.num_vertices(), surface.num_vertices());
  l.setFromTriplets(entries.begin(), entries.end());
  return l;
}

Eigen::SparseMatrix<double> cotan_laplacian(const ConformalState& state) {
  const TriSurface& s = *state.surface;
  return cotan_laplacian(s, cotan_weights(s, corner_angles(state)));
}

Eigen::VectorXd vertex_areas(const TriSurface& surface, const Eigen::VectorXd& lengths) {
  Eigen::VectorXd areas = Eigen::VectorXd::Zero(surface.num_vertices());
  for (int t = 0; t < surface.num_triangles(); ++t) {
    const double a = lengths(surface.triangle_edge(t, 0));
    const double b = lengths(surface.triangle_edge(t, 1));
    const double c = lengths(surface.triangle_edge(t, 2));
    const double h = heron16(a, b, c);
    if (!strict_triangle(a, b, c) || !(h > 0)) {
      throw InvalidStateError(t, "triangle " + std::to_string(t) +
                                     " violates the strict triangle inequality");
    }
    const double third = std::sqrt(h) / 12.0;
    for (int v : surface.triangles()[static_cast<std::size_t>(t)]) areas(v) += third;
  }
  return areas;
}

Eigen::VectorXd vertex_areas(const ConformalState& state) {
  return vertex_areas(*state.surface, induced_lengths(state));
}

// ---------------------------------------------------------------------------
// Text format

TriSurface parse_trisurf(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next = [&](std::vector<std::string>& tok) {
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ss(line);
      tok.clear();
      for (std::string t; ss >> t;) tok.push_back(t);
      if (!tok.empty() && tok[0][0] != '#') return true;
    }
    return false;
  };
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw MeshParseError(line_no, "not an integer: '" + s + "'");
    return v;
  };
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw MeshParseError(line_no, "not a number: '" + s + "'");
    return v;
  };

  std::vector<std::string> tok;
  if (!next(tok) || tok.size() != 3 || tok[0] != "trisurf") {
    throw MeshParseError(line_no, "expected header 'trisurf <V> <F>'");
  }
  const int nv = to_int(tok[1]);
  const int nf = to_int(tok[2]);
  if (nv <= 0 || nf <= 0) throw MeshParseError(line_no, "vertex and face counts must be positive");

  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(nf));
  std::map<std::array<int, 2>, int> edge_line;
  for (int f = 0; f < nf; ++f) {
    if (!next(tok)) throw MeshParseError(line_no, "unexpected end of file, expected 'tri i j k'");
    if (tok.size() != 4 || tok[0] != "tri") throw MeshParseError(line_no, "expected 'tri i j k'");
    Triangle t{to_int(tok[1]), to_int(tok[2]), to_int(tok[3])};
    for (int v : t) {
      if (v < 0 || v >= nv) throw MeshParseError(line_no, "vertex index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw MeshParseError(line_no, "triangle repeats a vertex");
    }
    for (int c = 0; c < 3; ++c) {
      edge_line.emplace(edge_key(t[static_cast<std::size_t>(c)], t[static_cast<std::size_t>((c + 1) % 3)]), 0);
    }
    tris.push_back(t);
  }

  std::vector<std::pair<std::array<int, 2>, double>> lengths;
  while (next(tok)) {
    if (tok.size() != 4 || tok[0] != "len") throw MeshParseError(line_no, "expected 'len i j <float>'");
    const int i = to_int(tok[1]);
    const int j = to_int(tok[2]);
    if (i >= j) throw MeshParseError(line_no, "edge must be listed as 'len i j' with i < j");
    auto it = edge_line.find({i, j});
    if (it == edge_line.end()) throw MeshParseError(line_no, "edge " + tok[1] + "-" + tok[2] + " is not in any triangle");
    if (it->second != 0) {
      throw MeshParseError(line_no, "duplicate edge " + tok[1] + "-" + tok[2] + " (first on line " +
                                        std::to_string(it->second) + ")");
    }
    it->second = line_no;
    lengths.emplace_back(std::array{i, j}, to_double(tok[3]));
  }
  for (const auto& [e, where] : edge_line) {
    if (where == 0) {
      throw MeshParseError(line_no, "missing length for edge " + std::to_string(e[0]) + "-" +
                                        std::to_string(e[1]));
    }
  }
  return TriSurface(nv, std::move(tris), lengths);
}

TriSurface load_trisurf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file '" + path + "'");
  return parse_trisurf(in);
}

std::string format_trisurf(const TriSurface& surface) {
  std::ostringstream out;
  out.precision(17);
  out << "trisurf " << surface.num_vertices() << ' ' << surface.num_triangles() << '\n';
  for (const auto& t : surface.triangles()) out << "tri " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  std::vector<int> order(static_cast<std::size_t>(surface.num_edges()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return surface.edges()[static_cast<std::size_t>(a)] < surface.edges()[static_cast<std::size_t>(b)];
  });
  for (int e : order) {
    const auto& ij = surface.edges()[static_cast<std::size_t>(e)];
    out << "len " << ij[0] << ' ' << ij[1] << ' ' << surface.reference_lengths()(e) << '\n';
  }
  return out.str();
}

void save_trisurf(const TriSurface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file '" + path + "'");
  out << format_trisurf(surface);
}

}  // namespace lefschetz
