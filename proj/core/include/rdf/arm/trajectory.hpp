#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/pz/poly_zonotope.hpp"

namespace rdf::arm {

/// One member of the braking trajectory family: velocity ramps by
/// accel_scale * k until t_p, then falls linearly to zero at t_f.
struct TrajectoryParams {
    Eigen::VectorXd q0;
    Eigen::VectorXd qd0;
    Eigen::VectorXd k;
    Eigen::VectorXd accel_scale;
    double t_p = 0.5;
    double t_f = 1.0;

    static TrajectoryParams from_spec(const RobotSpec& spec, Eigen::VectorXd q0, Eigen::VectorXd qd0,
                                      Eigen::VectorXd k);
    void validate() const;
};

struct JointState {
    Eigen::VectorXd q;
    Eigen::VectorXd qd;
};

/// Closed-form position and velocity at time t in [0, t_f].
JointState desired_traj_eval(const TrajectoryParams& tp, double t);

struct TimeGrid {
    double t_f = 1.0;
    int n_t = 100;

    TimeGrid() = default;
    TimeGrid(double t_f, int n_t);
    double dt() const { return t_f / n_t; }
    /// Cell containing t; the last cell is closed on the right.
    int cell_of(double t) const;
};

/// T_i = (i + 1/2) dt + (dt / 2) x_{t_i} for cells i = 0 .. n_t-1.
std::vector<pz::PolyZonotope> make_time_pzs(const TimeGrid& grid);

/// Per-joint scalar PZs of position and velocity over one time cell, with
/// the k_j dependence on indeterminate IdRegistry::param(j).
struct TrajPz {
    std::vector<pz::PolyZonotope> q;
    std::vector<pz::PolyZonotope> qd;
};

TrajPz traj_pz(const RobotSpec& spec, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0, const TimeGrid& grid,
               int cell, pz::IdRegistry& registry);

/// Substitutions x_{k_j} := k_j for every joint.
std::vector<pz::Substitution> param_substitutions(const Eigen::VectorXd& k);

}  // namespace rdf::arm
