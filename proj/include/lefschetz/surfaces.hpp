#pragma once

// Reference triangulations with unit (equilateral) edge lengths.

#include "lefschetz/mesh.hpp"

namespace lefschetz::surfaces {

/// Regular tetrahedron, genus 0.
TriSurface tetrahedron(double edge_length = 1.0);

/// Icosahedron with `subdivisions` rounds of 1-to-4 midpoint subdivision.
TriSurface icosphere(int subdivisions);

/// n x m periodic grid of the triangular lattice, every vertex of degree 6.
/// Requires n, m >= 3.
TriSurface torus(int n, int m);

/// Connected sum of `genus` lattice tori in a chain. Each torus is
/// `size` x `size` (middle tori are `size` x 2·`size` to carry two necks).
/// A neck removes the 24 triangles within hex distance 2 of a vertex and glues
/// the two 12-vertex boundary rings with a one-step rotation, so every neck
/// vertex ends with degree 7 and all other vertices keep degree 6.
/// Requires genus >= 2 and size >= 6.
TriSurface connected_sum_of_tori(int genus, int size);

/// The bundled reference surfaces, by genus: icosphere(1), torus(8, 8),
/// connected_sum_of_tori(2, 7), connected_sum_of_tori(3, 6).
TriSurface reference_surface(int genus);

}  // namespace lefschetz::surfaces
