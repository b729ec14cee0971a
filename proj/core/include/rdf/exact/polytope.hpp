#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace rdf::exact {

/// Boundary tolerance: points this close to a face count as on it.
inline constexpr double kBoundaryTol = 1e-9;

struct Halfspace {
    Eigen::VectorXd a;  // outward normal, nonzero
    double b = 0.0;     // a . p <= b
};

/// Bounded convex polytope in 2 or 3 dimensions, kept in both forms.
/// In 2D the vertices run counter-clockwise and halfspace i is the edge
/// (v_i, v_{i+1}). In 3D each face is a triangle of vertex indices with
/// halfspace i its supporting plane.
struct ConvexPolytope {
    int dim = 0;
    Eigen::MatrixXd vertices;  // dim x n_v
    std::vector<Halfspace> halfspaces;
    std::vector<std::array<int, 3>> faces;

    /// max_h (a_h . c - b_h) / |a_h|; <= 0 inside.
    double max_violation(const Eigen::VectorXd& c) const;
    bool contains(const Eigen::VectorXd& c, double tol = kBoundaryTol) const { return max_violation(c) <= tol; }
};

/// Euclidean distance from an outside point to the polytope. Throws if c is inside.
double point_polytope_distance(const Eigen::VectorXd& c, const ConvexPolytope& p);

/// Distance from an inside point to the boundary, min_h (b_h - a_h . c) / |a_h|.
/// Throws if c is outside.
double penetration_distance(const Eigen::VectorXd& c, const ConvexPolytope& p);

/// Positive outside, negative inside, zero within kBoundaryTol of the boundary.
double signed_distance(const Eigen::VectorXd& c, const ConvexPolytope& p);

}  // namespace rdf::exact
