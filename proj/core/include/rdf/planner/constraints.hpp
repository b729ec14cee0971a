#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/reach_set.hpp"
#include "rdf/arm/trajectory.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/mlp.hpp"

namespace rdf::planner {

/// Constraint values (feasible when >= 0) and their Jacobian with respect to k.
struct Margins {
    Eigen::VectorXd value;
    Eigen::MatrixXd grad;  // rows = constraints, cols = n_q; empty when not requested
};

/// Joint position and velocity limits over every time cell, evaluated on the
/// trajectory PZs sliced at k. Row 2 (i n_q + j) is the position margin of
/// joint j in cell i and the next row is its velocity margin; each is
/// min(upper - sup, inf - lower). Generator magnitudes use sqrt(g^2 + eps^2),
/// which never undershoots |g| and keeps the margins differentiable.
class JointLimitConstraints {
public:
    JointLimitConstraints(const arm::RobotSpec& spec, const std::vector<arm::TrajPz>& cells, double eps = 1e-9);
    explicit JointLimitConstraints(const arm::ReachSet& reach, double eps = 1e-9);

    int size() const { return static_cast<int>(bounds_.size()); }
    Margins evaluate(const Eigen::VectorXd& k, bool with_grad = true) const;

private:
    struct Term {
        double coef;
        std::vector<std::uint8_t> k_exp;  // per joint
    };
    // A scalar PZ after slicing: c(k) +/- sum_groups |G_r(k)|.
    struct SlicedBound {
        std::vector<Term> center;
        std::vector<std::vector<Term>> groups;
    };
    SlicedBound compile(const pz::PolyZonotope& p) const;
    // Returns (center, radius) and accumulates their k-gradients.
    std::pair<double, double> eval(const SlicedBound& b, const Eigen::VectorXd& k, Eigen::VectorXd* dc,
                                   Eigen::VectorXd* dr) const;

    int n_q_ = 0;
    double eps_ = 1e-9;
    Eigen::VectorXd q_min_, q_max_, qd_min_, qd_max_;
    std::vector<SlicedBound> bounds_;  // [2 (i n_q + j) + {0: q, 1: qd}]
};

/// Neural collision margins: min_j yhat_j(q0, qd0, k, c_l) - delta per obstacle,
/// with the k-gradient of the minimizing output. Inference is batched over obstacles.
Margins neural_margins(const net::MlpModel& model, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                       const Eigen::VectorXd& k, const std::vector<exact::Obstacle>& obstacles, double delta,
                       bool with_grad = true);

/// Exact collision margins: rdf_ground_truth(c_l) - delta per obstacle, with
/// central differences in k (one-sided at the box boundary).
class ExactCollisionConstraints {
public:
    ExactCollisionConstraints(const arm::ReachSet& reach, std::vector<exact::Obstacle> obstacles, double delta,
                              double fd_step = 1e-4);

    int size() const { return static_cast<int>(obstacles_.size()); }
    Eigen::VectorXd values(const Eigen::VectorXd& k) const;
    Margins evaluate(const Eigen::VectorXd& k, bool with_grad = true) const;

private:
    const arm::ReachSet& reach_;
    std::vector<exact::Obstacle> obstacles_;
    double delta_;
    double step_;
};

}  // namespace rdf::planner
