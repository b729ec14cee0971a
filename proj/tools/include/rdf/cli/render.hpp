#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/exact/polytope.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/pz/zonotope.hpp"

namespace rdf::cli {

struct Segment {
    Eigen::Vector2d a;
    Eigen::Vector2d b;
};

/// Zero-level segments of a field sampled at n x n nodes spanning [lo, hi]^2;
/// values(i, j) is the sample at x = node i, y = node j. Saddles are split by
/// the cell-center average.
std::vector<Segment> marching_squares(const Eigen::MatrixXd& values, double lo, double hi);

/// Samples f on an n x n grid over [lo, hi]^2 (same node layout as above).
Eigen::MatrixXd sample_grid(const std::function<double(double, double)>& f, int n, double lo = -1.0, double hi = 1.0);

/// Layers of a static scene in world coordinates. 3D scenes draw as the xy
/// and xz projections; contours hold one segment list per view.
struct SceneRender {
    int n_d = 2;
    std::vector<pz::Zonotope> links;
    std::vector<exact::Obstacle> obstacles;
    std::vector<exact::ConvexPolytope> hulls;
    std::vector<std::vector<Segment>> contours;
};

std::string render_svg(const SceneRender& scene);

}  // namespace rdf::cli
