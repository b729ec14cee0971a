#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/reach_set.hpp"
#include "rdf/exact/polytope.hpp"
#include "rdf/pz/zonotope.hpp"

namespace rdf::exact {

/// Axis-aligned cube (square in 2D) obstacle.
struct Obstacle {
    Eigen::VectorXd center;
    double side = 0.0;

    pz::Zonotope zonotope() const;
};

struct RdfResult {
    std::vector<double> link_distances;
    std::vector<ConvexPolytope> polytopes;

    double min() const;
};

/// Hull of every time cell's sliced occupancy of each link, buffered by an
/// obstacle of the given side. All obstacles share the side length, so the
/// hulls serve every obstacle center.
std::vector<ConvexPolytope> buffered_hulls(const arm::ReachSet& reach, const Eigen::VectorXd& k,
                                           double obstacle_side);

/// Per-link signed distance of an obstacle center to precomputed hulls.
RdfResult rdf_from_hulls(const std::vector<ConvexPolytope>& hulls, const Eigen::VectorXd& obstacle_center);

RdfResult rdf_ground_truth(const arm::ReachSet& reach, const Eigen::VectorXd& k, const Obstacle& obstacle);
RdfResult rdf_ground_truth(const arm::RobotSpec& spec, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                           const Eigen::VectorXd& k, const Obstacle& obstacle);

}  // namespace rdf::exact
