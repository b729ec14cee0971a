#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/kinematics.hpp"
#include "rdf/arm/robot_spec.hpp"
#include "rdf/arm/trajectory.hpp"

namespace rdf::arm {

/// Trajectory and occupancy PZs of every time cell for one initial state.
/// Everything depending on k stays symbolic, so one ReachSet answers queries
/// for any k by slicing.
class ReachSet {
public:
    ReachSet(const RobotSpec& spec, Eigen::VectorXd q0, Eigen::VectorXd qd0, const PzOptions& options = {},
             bool with_occupancy = true);

    const RobotSpec& spec() const { return spec_; }
    const TimeGrid& grid() const { return grid_; }
    const Eigen::VectorXd& q0() const { return q0_; }
    const Eigen::VectorXd& qd0() const { return qd0_; }
    int num_cells() const { return grid_.n_t; }
    bool has_occupancy() const { return !fo_.empty(); }

    const TrajPz& traj(int cell) const { return traj_.at(static_cast<std::size_t>(cell)); }
    /// Occupancy PZ of link j over cell i.
    const pz::PolyZonotope& fo(int cell, int link) const;

    /// Sliced occupancy zonotopes of one link over all cells.
    std::vector<pz::Zonotope> sliced_fo(int link, const Eigen::VectorXd& k) const;

private:
    RobotSpec spec_;
    TimeGrid grid_;
    Eigen::VectorXd q0_, qd0_;
    std::vector<TrajPz> traj_;
    std::vector<std::vector<pz::PolyZonotope>> fo_;  // [cell][link]
};

}  // namespace rdf::arm
