#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/pz/zonotope.hpp"

namespace rdf::arm {

/// One revolute joint and the link it carries.
///
/// `offset` is the position of this joint's distal end (the next joint) in
/// the joint's own frame, so frame j sits at the tip of link j. The link box
/// is expressed in that frame.
struct Joint {
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    Eigen::VectorXd offset;
    pz::Zonotope link;
    double q_min = -3.141592653589793;
    double q_max = 3.141592653589793;
    double qd_min = -1.0;
    double qd_max = 1.0;
};

/// Timing of the trajectory family shared by planning and labeling.
struct Timing {
    double t_p = 0.5;
    double t_f = 1.0;
    int n_t = 100;
    Eigen::VectorXd accel_scale;  // per joint, rad/s^2
};

struct RobotSpec {
    int n_d = 2;
    std::vector<Joint> joints;
    Timing timing;
    double obstacle_side = 0.0;  // edge length of every obstacle cube, m

    int n_q() const { return static_cast<int>(joints.size()); }

    Eigen::VectorXd q_min() const;
    Eigen::VectorXd q_max() const;
    Eigen::VectorXd qd_min() const;
    Eigen::VectorXd qd_max() const;

    /// Throws std::invalid_argument describing the first broken invariant.
    void validate() const;

    std::string to_json() const;
    static RobotSpec from_json(const std::string& text);
    static RobotSpec load(const std::string& path);
    void save(const std::string& path) const;

    /// FNV-1a over the canonical JSON text.
    std::uint64_t hash() const;

    /// Planar arm in [-1, 1]^2 with n_q equal links of length 1/(1.2 n_q).
    static RobotSpec planar(int n_q);
    /// Generic 7-joint spatial arm, alternating z/y axes, reach 0.9 m.
    static RobotSpec spatial7();
};

/// accel_scale default: half the tightest velocity limit reached at t_p.
Eigen::VectorXd default_accel_scale(const RobotSpec& spec);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace rdf::arm
