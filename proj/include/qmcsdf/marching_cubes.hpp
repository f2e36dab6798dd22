#pragma once

#include <functional>

#include "qmcsdf/sdf.hpp"

namespace qmcsdf {

/// Iso-surface of the trilinear field, one vertex per crossed lattice edge.
/// Triangles face toward values above `iso`. Node values equal to `iso` are
/// treated as iso + 1e-12.
TriangleMesh marching_cubes(const SdfGrid& grid, double iso = 0.0);

/// Same extraction over the lattice of `resolution` nodes spanning `box`, with
/// node values drawn from `field` two z-layers at a time so the full grid is
/// never stored.
TriangleMesh marching_cubes(const std::function<double(const Vec3&)>& field, const SdfGrid::Resolution& resolution,
                            const Box3& box = default_sdf_box(), double iso = 0.0);

/// Merges vertices closer than `tol` (first occurrence wins) and drops
/// triangles that collapse.
TriangleMesh weld_vertices(const TriangleMesh& mesh, double tol = 1e-9);

}  // namespace qmcsdf
