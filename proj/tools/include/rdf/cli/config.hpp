#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rdf/arm/robot_spec.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/net/train.hpp"
#include "rdf/planner/receding_horizon.hpp"

namespace rdf::cli {

/// Bad or inconsistent configuration (exit code 1).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetSection {
    int n_init = 10;
    int n_obstacles = 16;
    unsigned threads = 0;
};

struct TrainSection {
    std::filesystem::path dataset;  // gen-dataset output directory
    net::TrainConfig train;
    int hidden_layers = 8;
    /// beta1 values to try; train.beta1 when empty. The best validation run is kept.
    std::vector<double> beta1_sweep;
};

struct EvalSection {
    std::filesystem::path model;    // train output directory
    std::filesystem::path dataset;  // gen-dataset output directory
};

struct PlanSection {
    int trials = 20;
    int obstacles = 2;
    planner::ConstraintMode mode = planner::ConstraintMode::exact;
    std::optional<double> delta;  // default depends on the mode
    double time_limit = 0.0;
    int max_steps = 400;
    std::filesystem::path model;      // train output directory, neural mode
    std::filesystem::path scenarios;  // optional scenario file to replay
    unsigned threads = 1;

    double effective_delta() const;
};

struct RenderSection {
    std::optional<Eigen::VectorXd> q;  // arm pose to draw
    std::optional<Eigen::VectorXd> q0, qd0, k;  // trajectory for hulls and the contour
    std::vector<exact::Obstacle> obstacles;
    bool hulls = true;
    std::string field = "none";  // none, exact or neural
    double field_side = 0.0;     // obstacle side of the exact field; 0 uses the robot's
    std::filesystem::path model;
    int resolution = 200;
};

/// Parsed run configuration. Relative paths resolve against the config file.
struct RunConfig {
    arm::RobotSpec spec;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
    DatasetSection dataset;
    TrainSection train;
    EvalSection eval;
    PlanSection plan;
    RenderSection render;

    static RunConfig from_json(const std::string& text, const std::filesystem::path& base_dir = {});
    static RunConfig load(const std::filesystem::path& path);

    /// The seed, or ConfigError when none was given.
    std::uint64_t require_seed() const;
    /// The output path, or ConfigError when none was given.
    const std::filesystem::path& require_out() const;
};

/// Spec from a config value: {"preset": "planar", "n_q": n}, {"preset": "spatial7"},
/// {"file": path}, or an inline spec object.
arm::RobotSpec robot_from_config(const std::string& json_text, const std::filesystem::path& base_dir);

std::string hex64(std::uint64_t v);

}  // namespace rdf::cli
