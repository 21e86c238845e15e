#include "lefschetz/surfaces.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace lefschetz::surfaces {

TriSurface tetrahedron(double edge_length) {
  return TriSurface::uniform(4, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}}, edge_length);
}

TriSurface icosphere(int subdivisions) {
  std::vector<Triangle> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  int nv = 12;
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto [it, inserted] = mid.emplace(key, nv);
      if (inserted) ++nv;
      return it->second;
    };
    std::vector<Triangle> next;
    next.reserve(tris.size() * 4);
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
  return TriSurface::uniform(nv, std::move(tris));
}

namespace {

// Lattice torus with optional necks cut out; vertex ids are offset so several
// tori can share one id space before gluing.
struct LatticePiece {
  int n = 0, m = 0, offset = 0;
  std::vector<Triangle> triangles;
  std::vector<std::vector<int>> rings;  // boundary cycles, oriented by the piece

  int id(int q, int r) const {
    q = ((q % n) + n) % n;
    r = ((r % m) + m) % m;
    return offset + q * m + r;
  }
};

int wrapped(int d, int period) {
  d = ((d % period) + period) % period;
  if (2 * d > period) d -= period;
  return d;
}

int hex_distance(int dq, int dr) { return std::max({std::abs(dq), std::abs(dr), std::abs(dq + dr)}); }

LatticePiece lattice_piece(int n, int m, int offset, const std::vector<std::array<int, 2>>& necks) {
  LatticePiece p{n, m, offset, {}, {}};
  auto dist = [&](int q, int r, const std::array<int, 2>& c) {
    return hex_distance(wrapped(q - c[0], n), wrapped(r - c[1], m));
  };
  auto inside = [&](int q, int r) {
    for (const auto& c : necks) {
      if (dist(q, r, c) <= 2) return true;
    }
    return false;
  };
  for (int q = 0; q < n; ++q) {
    for (int r = 0; r < m; ++r) {
      const std::array<std::array<int, 2>, 2> lower = {{{q + 1, r}, {q, r + 1}}};
      const std::array<std::array<int, 2>, 3> upper = {{{q + 1, r}, {q + 1, r + 1}, {q, r + 1}}};
      if (!(inside(q, r) && inside(lower[0][0], lower[0][1]) && inside(lower[1][0], lower[1][1]))) {
        p.triangles.push_back({p.id(q, r), p.id(q + 1, r), p.id(q, r + 1)});
      }
      if (!(inside(upper[0][0], upper[0][1]) && inside(upper[1][0], upper[1][1]) &&
            inside(upper[2][0], upper[2][1]))) {
        p.triangles.push_back({p.id(q + 1, r), p.id(q + 1, r + 1), p.id(q, r + 1)});
      }
    }
  }

  // Boundary directed edges: present in a kept triangle, reverse absent.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : p.triangles) {
    for (int c = 0; c < 3; ++c) directed[{t[static_cast<std::size_t>(c)], t[static_cast<std::size_t>((c + 1) % 3)]}]++;
  }
  std::map<int, int> next;
  for (const auto& [e, count] : directed) {
    if (!directed.contains({e.second, e.first})) next[e.first] = e.second;
  }
  for (const auto& c : necks) {
    const int start = p.id(c[0] + 2, c[1]);
    std::vector<int> ring{start};
    for (int v = next.at(start); v != start; v = next.at(v)) ring.push_back(v);
    p.rings.push_back(std::move(ring));
  }
  return p;
}

std::map<int, int> degrees(const std::vector<Triangle>& tris) {
  std::map<std::pair<int, int>, bool> edges;
  for (const auto& t : tris) {
    for (int c = 0; c < 3; ++c) {
      edges[std::minmax(t[static_cast<std::size_t>(c)], t[static_cast<std::size_t>((c + 1) % 3)])] = true;
    }
  }
  std::map<int, int> deg;
  for (const auto& [e, unused] : edges) {
    deg[e.first]++;
    deg[e.second]++;
  }
  return deg;
}

}  // namespace

TriSurface torus(int n, int m) {
  if (n < 3 || m < 3) throw MeshError("torus grid needs n, m >= 3");
  LatticePiece p = lattice_piece(n, m, 0, {});
  return TriSurface::uniform(n * m, std::move(p.triangles));
}

TriSurface connected_sum_of_tori(int genus, int size) {
  if (genus < 2) throw MeshError("connected sum needs genus >= 2");
  if (size < 6) throw MeshError("lattice tori need size >= 6 to carry a neck");

  std::vector<LatticePiece> pieces;
  int offset = 0;
  for (int i = 0; i < genus; ++i) {
    const bool first = i == 0;
    const bool last = i == genus - 1;
    std::vector<std::array<int, 2>> necks;
    int m = size;
    if (first || last) {
      necks.push_back({0, 0});
    } else {
      m = 2 * size;
      necks.push_back({0, 0});
      necks.push_back({0, size});
    }
    pieces.push_back(lattice_piece(size, m, offset, necks));
    offset += size * m;
  }

  std::vector<Triangle> all;
  for (const auto& p : pieces) all.insert(all.end(), p.triangles.begin(), p.triangles.end());
  const auto deg = degrees(all);

  std::vector<int> parent(static_cast<std::size_t>(offset));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };

  // Piece i's last ring glues to piece i+1's first ring.
  for (int i = 0; i + 1 < genus; ++i) {
    const auto& a = pieces[static_cast<std::size_t>(i)].rings.back();
    const auto& b = pieces[static_cast<std::size_t>(i + 1)].rings.front();
    const int len = static_cast<int>(a.size());
    if (static_cast<int>(b.size()) != len) throw MeshError("neck rings differ in length");
    int shift = -1;
    for (int k = 0; k < len && shift < 0; ++k) {
      bool ok = true;
      for (int j = 0; j < len && ok; ++j) {
        const int partner = b[static_cast<std::size_t>(((k - j) % len + len) % len)];
        ok = deg.at(a[static_cast<std::size_t>(j)]) + deg.at(partner) == 9;
      }
      if (ok) shift = k;
    }
    if (shift < 0) throw MeshError("no rotation glues the neck rings into degree-7 vertices");
    for (int j = 0; j < len; ++j) {
      const int partner = b[static_cast<std::size_t>(((shift - j) % len + len) % len)];
      parent[static_cast<std::size_t>(find(partner))] = find(a[static_cast<std::size_t>(j)]);
    }
  }

  std::map<int, int> relabel;
  for (auto& t : all) {
    for (int& v : t) {
      const int root = find(v);
      auto [it, inserted] = relabel.emplace(root, static_cast<int>(relabel.size()));
      v = it->second;
    }
  }
  return TriSurface::uniform(static_cast<int>(relabel.size()), std::move(all));
}

TriSurface reference_surface(int genus) {
  switch (genus) {
    case 0: return icosphere(1);
    case 1: return torus(8, 8);
    case 2: return connected_sum_of_tori(2, 7);
    case 3: return connected_sum_of_tori(3, 6);
    default: throw MeshError("no reference surface for genus " + std::to_string(genus));
  }
}

}  // namespace lefschetz::surfaces
