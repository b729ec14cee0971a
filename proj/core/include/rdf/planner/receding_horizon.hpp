#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/kinematics.hpp"
#include "rdf/arm/robot_spec.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/mlp.hpp"
#include "rdf/planner/audit.hpp"
#include "rdf/planner/solver.hpp"

namespace rdf::planner {

enum class ConstraintMode { neural, exact };
enum class PlanStatus { reached, stuck, collided, step_budget_exhausted };

std::string to_string(ConstraintMode m);
std::string to_string(PlanStatus s);
ConstraintMode parse_mode(const std::string& s);

struct PlanProblem {
    arm::RobotSpec spec;
    std::vector<exact::Obstacle> obstacles;
    Eigen::VectorXd q_start;
    Eigen::VectorXd q_goal;
    double delta = 0.03;  // m
    ConstraintMode mode = ConstraintMode::exact;
    double time_limit = 0.0;  // s of solver time per planning step; <= 0 means none
    int max_steps = 400;
    double goal_tolerance = 0.1;  // rad
    /// Straight-line waypoints lie at most this far (rad) from the current configuration.
    double waypoint_step = 0.5;
    std::uint64_t seed = 0;  // stall perturbations
    arm::PzOptions pz_options;
    SolverOptions solver;

    void validate() const;
};

struct IterationRecord {
    int step = 0;
    bool feasible = false;
    Eigen::VectorXd k;
    Eigen::VectorXd waypoint;
    double solve_seconds = 0.0;
    double min_margin = 0.0;  // over joint-limit and collision constraints of k
    int evaluations = 0;
    bool timed_out = false;
};

struct PlanResult {
    PlanStatus status = PlanStatus::step_budget_exhausted;
    int steps = 0;
    std::vector<TrajectorySample> executed;  // 1 ms spacing
    std::vector<IterationRecord> iterations;
    std::vector<AuditHit> violations;
    /// Configuration when the loop ended, before the closing brake.
    Eigen::VectorXd terminal_q;
};

/// Sample spacing of executed trajectories, s.
inline constexpr double kSampleDt = 1e-3;

/// One planning step from (q0, qd0): joint limits plus collision margins, cost
/// |q(t_p; k) - waypoint|^2, starts {unconstrained minimizer, 0, previous k}.
/// `model` is required in neural mode.
SolveOutcome solve_iteration(const PlanProblem& problem, const net::MlpModel* model, const Eigen::VectorXd& q0,
                             const Eigen::VectorXd& qd0, const Eigen::VectorXd& waypoint,
                             const std::optional<Eigen::VectorXd>& previous_k = std::nullopt);

/// Plan, execute [0, t_p), replan from the state at t_p. Falls back to the
/// previous plan's braking tail when a step is infeasible. Every run ends at rest.
PlanResult receding_horizon(const PlanProblem& problem, const net::MlpModel* model = nullptr);

}  // namespace rdf::planner
