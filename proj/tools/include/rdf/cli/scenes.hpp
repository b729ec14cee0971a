#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/mlp.hpp"
#include "rdf/planner/receding_horizon.hpp"

namespace rdf::cli {

struct TrialScene {
    Eigen::VectorXd q_start;
    Eigen::VectorXd q_goal;
    std::vector<exact::Obstacle> obstacles;
};

/// Start and goal uniform within the joint limits, obstacles uniform in
/// [-1, 1]^n_d with the robot's obstacle side. Draws whose start or goal collides are redrawn.
std::vector<TrialScene> sample_scenes(const arm::RobotSpec& spec, int count, int n_obstacles, std::uint64_t seed);

void write_scenes(const std::filesystem::path& path, const arm::RobotSpec& spec, const std::vector<TrialScene>& scenes);
/// Throws ConfigError if the file was written for a different spec.
std::vector<TrialScene> read_scenes(const std::filesystem::path& path, const arm::RobotSpec& spec);

struct TrialSettings {
    planner::ConstraintMode mode = planner::ConstraintMode::exact;
    double delta = 0.0;
    double time_limit = 0.0;
    int max_steps = 400;
    std::uint64_t seed = 0;
};

struct TrialRecord {
    int trial = 0;
    planner::PlanStatus status = planner::PlanStatus::step_budget_exhausted;
    int steps = 0;
    int infeasible_steps = 0;
    double min_margin = 0.0;  // over feasible steps
    int violations = 0;
    double goal_distance = 0.0;  // when the loop ended
    double rest_distance = 0.0;  // after the closing brake
    double final_speed = 0.0;
    double mean_solve_seconds = 0.0;
    double max_solve_seconds = 0.0;
};

TrialRecord run_trial(const arm::RobotSpec& spec, const TrialScene& scene, int index, const TrialSettings& settings,
                      const net::MlpModel* model);

/// Runs every scene; trials are spread over `threads` workers (0: hardware
/// concurrency) and the output order follows the scene order.
std::vector<TrialRecord> run_trials(const arm::RobotSpec& spec, const std::vector<TrialScene>& scenes,
                                    const TrialSettings& settings, const net::MlpModel* model, unsigned threads = 1,
                                    const std::function<void(const TrialRecord&)>& on_done = {});

}  // namespace rdf::cli
