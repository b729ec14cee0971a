#pragma once

#include <Eigen/Dense>

#include "rdf/exact/polytope.hpp"

namespace rdf::exact {

/// Convex hull of the columns of `points` (2 or 3 rows). Collinear or
/// coplanar clouds are inflated by a 1e-9 box and hulled again.
ConvexPolytope convex_hull(const Eigen::MatrixXd& points);

}  // namespace rdf::exact
