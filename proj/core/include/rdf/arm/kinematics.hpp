#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/pz/mat_poly_zonotope.hpp"
#include "rdf/pz/poly_zonotope.hpp"

namespace rdf::arm {

struct FramePose {
    Eigen::MatrixXd R;  // n_d x n_d
    Eigen::VectorXd p;  // n_d
};

/// Joint rotation R_j^{j-1}(q) restricted to the workspace dimension.
Eigen::MatrixXd joint_rotation(const RobotSpec& spec, int joint, double q);

/// World poses of every frame: R_j = prod_{l<=j} R_l^{l-1}, p_j = sum_{l<=j} R_l p_l^{l-1}.
std::vector<FramePose> fk_point(const RobotSpec& spec, const Eigen::VectorXd& q);

/// Occupancy of link j at configuration q, p_j + R_j L_j.
pz::Zonotope link_occupancy(const RobotSpec& spec, const std::vector<FramePose>& poses, int joint);

struct PzOptions {
    int taylor_degree = 6;
    /// Term budget applied after every product in the kinematic chain.
    std::size_t budget = 24;
};

struct PzFrame {
    pz::MatPolyZonotope R;
    pz::PolyZonotope p;
};

/// Rotation set of joint j from a scalar joint-angle PZ.
pz::MatPolyZonotope pz_joint_rotation(const RobotSpec& spec, int joint, const pz::PolyZonotope& q,
                                      pz::IdRegistry& registry, const PzOptions& options);

std::vector<PzFrame> pz_fk(const RobotSpec& spec, std::span<const pz::PolyZonotope> q, pz::IdRegistry& registry,
                           const PzOptions& options = {});

/// Forward occupancy PZs, one per link.
std::vector<pz::PolyZonotope> pz_fo(const RobotSpec& spec, std::span<const pz::PolyZonotope> q,
                                    pz::IdRegistry& registry, const PzOptions& options = {});
std::vector<pz::PolyZonotope> pz_fo(const RobotSpec& spec, const std::vector<PzFrame>& frames,
                                    pz::IdRegistry& registry, const PzOptions& options = {});

/// Slices every trajectory parameter at k, then encloses what is left by a zonotope.
pz::Zonotope slice_fo(const pz::PolyZonotope& fo, const Eigen::VectorXd& k);

}  // namespace rdf::arm
