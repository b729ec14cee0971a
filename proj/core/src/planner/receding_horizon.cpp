#include "rdf/planner/receding_horizon.hpp"

#include <cmath>
#include <stdexcept>

#include "rdf/arm/reach_set.hpp"
#include "rdf/arm/trajectory.hpp"
#include "rdf/planner/constraints.hpp"
#include "rdf/random.hpp"

namespace rdf::planner {

std::string to_string(ConstraintMode m) { return m == ConstraintMode::neural ? "neural" : "exact"; }

std::string to_string(PlanStatus s) {
    switch (s) {
        case PlanStatus::reached: return "reached";
        case PlanStatus::stuck: return "stuck";
        case PlanStatus::collided: return "collided";
        default: return "step-budget-exhausted";
    }
}

ConstraintMode parse_mode(const std::string& s) {
    if (s == "neural") return ConstraintMode::neural;
    if (s == "exact") return ConstraintMode::exact;
    throw std::invalid_argument("unknown constraint mode '" + s + "' (expected neural or exact)");
}

void PlanProblem::validate() const {
    spec.validate();
    const int n = spec.n_q();
    if (q_start.size() != n || q_goal.size() != n)
        throw std::invalid_argument("PlanProblem: start and goal need n_q entries");
    if ((q_start.array() < spec.q_min().array()).any() || (q_start.array() > spec.q_max().array()).any())
        throw std::invalid_argument("PlanProblem: start outside the joint limits");
    if (!(delta >= 0)) throw std::invalid_argument("PlanProblem: delta must be >= 0");
    if (max_steps < 0) throw std::invalid_argument("PlanProblem: max_steps must be >= 0");
    if (!(goal_tolerance > 0) || !(waypoint_step > 0))
        throw std::invalid_argument("PlanProblem: tolerances must be positive");
    for (const auto& o : obstacles)
        if (o.center.size() != spec.n_d || !(o.side > 0))
            throw std::invalid_argument("PlanProblem: malformed obstacle");
}

namespace {

Margins stack(const Margins& a, const Margins& b, bool with_grad, int n) {
    Margins m;
    m.value.resize(a.value.size() + b.value.size());
    m.value << a.value, b.value;
    if (with_grad) {
        m.grad.resize(m.value.size(), n);
        if (a.value.size()) m.grad.topRows(a.value.size()) = a.grad;
        if (b.value.size()) m.grad.bottomRows(b.value.size()) = b.grad;
    }
    return m;
}

// Samples of a plan over [a, b) with absolute time offset t0.
void append_samples(const arm::TrajectoryParams& tp, double a, double b, double t0,
                    std::vector<TrajectorySample>& out) {
    const auto n = static_cast<long>(std::ceil((b - a) / kSampleDt - 1e-9));
    for (long m = 0; m < n; ++m) {
        const double t = a + static_cast<double>(m) * kSampleDt;
        const arm::JointState s = arm::desired_traj_eval(tp, t);
        out.push_back({t0 + t - a, s.q, s.qd});
    }
}

}  // namespace

SolveOutcome solve_iteration(const PlanProblem& problem, const net::MlpModel* model, const Eigen::VectorXd& q0,
                             const Eigen::VectorXd& qd0, const Eigen::VectorXd& waypoint,
                             const std::optional<Eigen::VectorXd>& previous_k) {
    const arm::RobotSpec& spec = problem.spec;
    const int n = spec.n_q();
    if (problem.mode == ConstraintMode::neural && !model)
        throw std::invalid_argument("solve_iteration: neural mode needs a model");
    const bool exact_mode = problem.mode == ConstraintMode::exact && !problem.obstacles.empty();
    const arm::ReachSet reach(spec, q0, qd0, problem.pz_options, exact_mode);
    const JointLimitConstraints limits(reach);
    std::optional<ExactCollisionConstraints> exact_c;
    if (exact_mode) exact_c.emplace(reach, problem.obstacles, problem.delta);

    const double tp = spec.timing.t_p;
    const Eigen::VectorXd dq_dk = 0.5 * spec.timing.accel_scale * tp * tp;
    const Eigen::VectorXd q_free = q0 + qd0 * tp;
    NlpProblem nlp;
    nlp.n = n;
    nlp.cost = [&](const Eigen::VectorXd& k, Eigen::VectorXd* g) {
        const Eigen::VectorXd r = q_free + dq_dk.cwiseProduct(k) - waypoint;
        if (g) *g = 2.0 * r.cwiseProduct(dq_dk);
        return r.squaredNorm();
    };
    const Eigen::MatrixXd cost_hessian = Eigen::MatrixXd(2.0 * dq_dk.cwiseAbs2().asDiagonal());
    nlp.cost_hessian = [&](const Eigen::VectorXd&) { return cost_hessian; };
    nlp.constraints = [&](const Eigen::VectorXd& k, bool with_grad) {
        const Margins lim = limits.evaluate(k, with_grad);
        Margins col;
        if (exact_c) {
            col = exact_c->evaluate(k, with_grad);
        } else if (problem.mode == ConstraintMode::neural) {
            col = neural_margins(*model, q0, qd0, k, problem.obstacles, problem.delta, with_grad);
        }
        return stack(lim, col, with_grad, n);
    };

    // The unconstrained minimizer goes first: if it is feasible it is optimal.
    const Eigen::VectorXd seed = minimize_box(nlp, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::VectorXd> starts{seed, Eigen::VectorXd::Zero(n)};
    if (previous_k) starts.push_back(*previous_k);
    SolverOptions o = problem.solver;
    o.time_limit = problem.time_limit;
    o.target_cost = nlp.cost(seed, nullptr) + 1e-12;
    return solve_augmented_lagrangian(nlp, starts, o);
}

PlanResult receding_horizon(const PlanProblem& problem, const net::MlpModel* model) {
    problem.validate();
    const arm::RobotSpec& spec = problem.spec;
    const int n = spec.n_q();
    const double t_p = spec.timing.t_p, t_f = spec.timing.t_f;
    Rng rng(derive_seed(problem.seed, 11));

    PlanResult result;
    Eigen::VectorXd q = problem.q_start;
    Eigen::VectorXd qd = Eigen::VectorXd::Zero(n);
    double clock = 0.0;
    std::optional<arm::TrajectoryParams> plan;  // last feasible plan, still executing
    int infeasible_streak = 0;
    double best_distance = (q - problem.q_goal).norm();
    int stall = 0, detour = 0;
    Eigen::VectorXd detour_waypoint;

    // Brings the arm to rest along the current plan's braking tail.
    auto brake = [&] {
        if (!plan) return;
        append_samples(*plan, t_p, t_f, clock, result.executed);
        clock += t_f - t_p;
        const arm::JointState end = arm::desired_traj_eval(*plan, t_f);
        q = end.q;
        qd = end.qd;
        plan.reset();
    };

    result.status = PlanStatus::step_budget_exhausted;
    int step = 0;
    for (; step < problem.max_steps; ++step) {
        const double distance = (q - problem.q_goal).norm();
        if (distance < problem.goal_tolerance) {
            result.status = PlanStatus::reached;
            break;
        }
        if (distance < best_distance - 1e-3) {
            best_distance = distance;
            stall = 0;
        } else if (++stall >= 5 && detour == 0) {
            // Random detour waypoint to escape a local minimum.
            detour_waypoint = q;
            for (int j = 0; j < n; ++j) detour_waypoint[j] += rng.uniform(-problem.waypoint_step, problem.waypoint_step);
            detour = 3;
            stall = 0;
        }
        Eigen::VectorXd waypoint;
        if (detour > 0) {
            waypoint = detour_waypoint;
            --detour;
        } else {
            const Eigen::VectorXd d = problem.q_goal - q;
            waypoint = q + d * std::min(1.0, problem.waypoint_step / d.norm());
        }

        std::optional<Eigen::VectorXd> prev_k;
        if (plan) prev_k = plan->k;
        const SolveOutcome s = solve_iteration(problem, model, q, qd, waypoint, prev_k);
        IterationRecord rec;
        rec.step = step;
        rec.feasible = s.status == SolveStatus::feasible;
        rec.k = s.k;
        rec.waypoint = waypoint;
        rec.solve_seconds = s.seconds;
        rec.min_margin = s.min_margin;
        rec.evaluations = s.evaluations;
        rec.timed_out = s.timed_out;
        result.iterations.push_back(rec);

        if (rec.feasible) {
            infeasible_streak = 0;
            plan = arm::TrajectoryParams::from_spec(spec, q, qd, s.k);
            append_samples(*plan, 0.0, t_p, clock, result.executed);
            clock += t_p;
            const arm::JointState next = arm::desired_traj_eval(*plan, t_p);
            q = next.q;
            qd = next.qd;
            continue;
        }
        if (++infeasible_streak >= 2) {
            brake();
            result.status = PlanStatus::stuck;
            ++step;
            break;
        }
        if (plan) {
            brake();
        } else {
            // Already at rest: hold for one step.
            for (long m = 0; m < static_cast<long>(std::llround(t_p / kSampleDt)); ++m)
                result.executed.push_back({clock + static_cast<double>(m) * kSampleDt, q, qd});
            clock += t_p;
        }
    }
    result.steps = step;
    result.terminal_q = q;
    brake();
    result.executed.push_back({clock, q, qd});
    result.violations = collision_audit(spec, result.executed, problem.obstacles);
    if (!result.violations.empty()) result.status = PlanStatus::collided;
    return result;
}

}  // namespace rdf::planner
