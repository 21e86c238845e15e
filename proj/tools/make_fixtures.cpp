// Regenerates the bundled meshes and words under data/.

#include "lefschetz/mcg.hpp"
#include "lefschetz/mesh.hpp"
#include "lefschetz/surfaces.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace lefschetz;

namespace {

TriSurface with_triangles(const TriSurface& s, std::vector<Triangle> tris) {
  std::vector<std::pair<std::array<int, 2>, double>> lengths;
  for (int e = 0; e < s.num_edges(); ++e) lengths.emplace_back(s.edges()[static_cast<std::size_t>(e)], s.reference_lengths()(e));
  return TriSurface(s.num_vertices(), std::move(tris), lengths);
}

TriSurface with_length(const TriSurface& s, int edge, double length) {
  std::vector<std::pair<std::array<int, 2>, double>> lengths;
  for (int e = 0; e < s.num_edges(); ++e) {
    lengths.emplace_back(s.edges()[static_cast<std::size_t>(e)], e == edge ? length : s.reference_lengths()(e));
  }
  return TriSurface(s.num_vertices(), s.triangles(), lengths);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <data-dir>\n";
    return 1;
  }
  namespace fs = std::filesystem;
  const fs::path data = argv[1];
  fs::create_directories(data / "meshes" / "invalid");
  fs::create_directories(data / "words");

  const char* names[] = {"sphere", "torus", "genus2", "genus3"};
  for (int g = 0; g <= 3; ++g) {
    save_trisurf(surfaces::reference_surface(g), (data / "meshes" / (std::string(names[g]) + ".trisurf")).string());
  }
  save_trisurf(surfaces::tetrahedron(), (data / "meshes" / "tetrahedron.trisurf").string());
  save_trisurf(surfaces::torus(3, 3), (data / "meshes" / "torus3x3.trisurf").string());

  const TriSurface g2 = surfaces::reference_surface(2);
  auto flipped = g2.triangles();
  std::swap(flipped[0][1], flipped[0][2]);
  save_trisurf(with_triangles(g2, flipped), (data / "meshes" / "invalid" / "flipped_triangle.trisurf").string());
  auto deleted = g2.triangles();
  deleted.erase(deleted.begin());
  save_trisurf(with_triangles(g2, deleted), (data / "meshes" / "invalid" / "deleted_face.trisurf").string());
  save_trisurf(with_length(g2, 0, 10.0), (data / "meshes" / "invalid" / "oversized_edge.trisurf").string());
  {
    // tetrahedron whose third face line lost a vertex (line 4)
    std::string text = format_trisurf(surfaces::tetrahedron());
    const std::string face = "tri 0 2 3\n";
    text.replace(text.find(face), face.size(), "tri 0 2\n");
    std::ofstream(data / "meshes" / "invalid" / "malformed.trisurf") << text;
  }

  auto word = [&](const MonodromyWord& w, const std::string& name) {
    save_word(w, (data / "words" / (name + ".word")).string());
  };
  word(MonodromyWord{1, {}}, "empty");
  word(words::elliptic_surface(1), "e1");
  word(words::elliptic_surface(2), "e2");
  word(words::elliptic_surface(3), "e3");
  word(mirror_word(words::elliptic_surface(1)), "e1_mirror");
  word(concatenate(words::elliptic_surface(1), mirror_word(words::elliptic_surface(2))), "e1_then_mirror_e2");
  word(words::odd_chain_relation(2), "genus2_chain");
  word(words::hyperelliptic_involution_relation(2), "genus2_hyperelliptic");
  word(words::separating_achiral_relation(), "genus2_separating_achiral");
  word(words::odd_chain_relation(3), "genus3_chain");
  word(words::hyperelliptic_involution_relation(3), "genus3_hyperelliptic");
  MonodromyWord single = words::elliptic_surface(1);
  single.letters.resize(1);
  word(single, "single_twist");
  return 0;
}
