#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/pz/zonotope.hpp"

namespace rdf::planner {

struct TrajectorySample {
    double t = 0.0;
    Eigen::VectorXd q;
    Eigen::VectorXd qd;
};

struct AuditHit {
    double t = 0.0;
    int link = 0;
    int obstacle = 0;
};

/// Separating-axis test between a parallelotope (a rotated link box) and an
/// axis-aligned obstacle. Touching counts as overlap.
bool boxes_overlap(const pz::Zonotope& link, const exact::Obstacle& obstacle);

/// Every (sample, link, obstacle) triple whose boxes overlap.
std::vector<AuditHit> collision_audit(const arm::RobotSpec& spec, const std::vector<TrajectorySample>& samples,
                                      const std::vector<exact::Obstacle>& obstacles);

/// Same test for one configuration.
bool in_collision(const arm::RobotSpec& spec, const Eigen::VectorXd& q, const std::vector<exact::Obstacle>& obstacles);

}  // namespace rdf::planner
