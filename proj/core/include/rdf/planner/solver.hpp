#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "rdf/planner/constraints.hpp"

namespace rdf::planner {

/// min f(k) subject to c(k) >= 0 and k in [-1, 1]^n.
struct NlpProblem {
    int n = 0;
    /// Value; fills the gradient when the pointer is non-null.
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)> cost;
    /// Optional cost Hessian; identity when unset.
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> cost_hessian;
    /// Constraint values, plus the Jacobian when requested. Unset means unconstrained.
    std::function<Margins(const Eigen::VectorXd&, bool)> constraints;
};

struct SolverOptions {
    /// The solver aims for c >= tol and accepts a point once every c >= 0.
    double constraint_tol = 1e-6;
    int max_outer = 10;
    int max_inner = 20;
    double mu0 = 10.0;
    double mu_growth = 10.0;
    /// Outer iterations stop once k moves less than this while feasible.
    double step_tol = 1e-5;
    /// Stops early once a feasible point at or below this cost is found.
    double target_cost = -std::numeric_limits<double>::infinity();
    /// Cap on augmented-Lagrangian evaluations per call (0: none). Unlike the
    /// time limit it keeps results reproducible.
    int max_evaluations = 250;
    /// Wall-clock budget in seconds for one call; <= 0 disables it.
    double time_limit = 0.0;
};

enum class SolveStatus { feasible, infeasible };

struct SolveOutcome {
    SolveStatus status = SolveStatus::infeasible;
    Eigen::VectorXd k;
    double cost = 0.0;
    double min_margin = 0.0;  // of the returned k; +inf without constraints
    int evaluations = 0;
    bool timed_out = false;
    bool budget_exhausted = false;
    double seconds = 0.0;
};

/// Augmented Lagrangian whose inner loop takes projected Gauss-Newton steps
/// (cost Hessian plus mu grad c grad c^T over active rows), run from each
/// start in turn (duplicates skipped). Returns the lowest-cost feasible point
/// visited; ties keep the earlier one.
SolveOutcome solve_augmented_lagrangian(const NlpProblem& problem, const std::vector<Eigen::VectorXd>& starts,
                                        const SolverOptions& options = {});

/// Minimizes the cost alone over the box.
Eigen::VectorXd minimize_box(const NlpProblem& problem, const Eigen::VectorXd& start, int max_iterations = 200);

}  // namespace rdf::planner
