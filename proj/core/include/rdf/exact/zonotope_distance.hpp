#pragma once

#include <Eigen/Dense>

#include "rdf/exact/polytope.hpp"
#include "rdf/pz/zonotope.hpp"

namespace rdf::exact {

/// Generator cap for 3D vertex enumeration.
inline constexpr int kMaxGenerators3d = 12;

/// Point-in-zonotope test within `tol` (handles flat zonotopes).
bool zono_contains(const pz::Zonotope& z, const Eigen::VectorXd& p, double tol = kBoundaryTol);

/// Vertex set of a 2D or 3D zonotope as columns. 3D input with more than
/// kMaxGenerators3d (non-parallel) generators throws; reduce first.
Eigen::MatrixXd zono_vertices(const pz::Zonotope& z);

/// Halfspace/vertex form of a zonotope.
ConvexPolytope zono_polytope(const pz::Zonotope& z);

/// Z1 and Z2 intersect iff c1 lies in (c2, [G1 G2]).
bool zono_intersects(const pz::Zonotope& z1, const pz::Zonotope& z2);

/// Signed distance of c1 to the boundary of (c2, [G1 G2]).
double zono_signed_distance(const pz::Zonotope& z1, const pz::Zonotope& z2);

}  // namespace rdf::exact
