#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdf/arm/kinematics.hpp"
#include "rdf/arm/reach_set.hpp"
#include "rdf/net/mlp.hpp"
#include "rdf/net/train.hpp"
#include "rdf/planner/audit.hpp"
#include "rdf/planner/constraints.hpp"
#include "rdf/planner/receding_horizon.hpp"
#include "rdf/planner/solver.hpp"
#include "support/oracles.hpp"

using namespace rdf;
using namespace rdf::planner;

namespace {

const arm::RobotSpec kSpec = arm::RobotSpec::planar(2);

// Obstacles lining both sides of the resting straight arm, clear of the link
// boxes by `gap`.
std::vector<exact::Obstacle> hugging_wall(double gap) {
    const double side = kSpec.obstacle_side;
    const double half_width = kSpec.joints[0].link.radius()[1];
    std::vector<exact::Obstacle> out;
    for (double x = 0.05; x < 0.85; x += 0.6 * side)
        for (double s : {-1.0, 1.0}) out.push_back({Eigen::Vector2d(x, s * (half_width + 0.5 * side + gap)), side});
    return out;
}

PlanProblem problem_for(Eigen::VectorXd start, Eigen::VectorXd goal, std::vector<exact::Obstacle> obstacles) {
    PlanProblem p;
    p.spec = kSpec;
    p.q_start = std::move(start);
    p.q_goal = std::move(goal);
    p.obstacles = std::move(obstacles);
    p.mode = ConstraintMode::exact;
    p.delta = 0.0;
    return p;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& k,
                            double h) {
    const Eigen::VectorXd f0 = f(k);
    Eigen::MatrixXd J(f0.size(), k.size());
    for (Eigen::Index j = 0; j < k.size(); ++j) {
        Eigen::VectorXd kp = k, km = k;
        kp[j] += h;
        km[j] -= h;
        J.col(j) = (f(kp) - f(km)) / (2 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("joint limit margins") {
    const arm::ReachSet rest(kSpec, Eigen::Vector2d(0.2, -0.4), Eigen::Vector2d::Zero(), {}, false);
    const JointLimitConstraints lim(rest);
    CHECK(lim.size() == 2 * 2 * kSpec.timing.n_t);
    CHECK(lim.evaluate(Eigen::Vector2d::Zero(), false).value.minCoeff() > 0);

    const double top = kSpec.joints[0].q_max;
    const arm::ReachSet edge(kSpec, Eigen::Vector2d(top - 1e-3, 0), Eigen::Vector2d::Zero(), {}, false);
    const JointLimitConstraints lim_edge(edge);
    CHECK(lim_edge.evaluate(Eigen::Vector2d(1, 0), false).value.minCoeff() <= 0);
    CHECK(lim_edge.evaluate(Eigen::Vector2d(-1, 0), false).value.minCoeff() > 0);
}

TEST_CASE("joint limit gradients match finite differences") {
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = oracle::random_state(kSpec, rng);
        const arm::ReachSet reach(kSpec, s.q0, s.qd0, {}, false);
        const JointLimitConstraints lim(reach);
        const Eigen::VectorXd k = oracle::uniform_vec(rng, 2, -0.9, 0.9);
        const Margins m = lim.evaluate(k);
        const Eigen::MatrixXd fd = fd_jacobian([&](const Eigen::VectorXd& x) { return lim.evaluate(x, false).value; }, k, 1e-6);
        for (Eigen::Index r = 0; r < m.grad.rows(); ++r)
            for (Eigen::Index c = 0; c < 2; ++c) CHECK(oracle::rel_error(m.grad(r, c), fd(r, c), 1e-2) <= 1e-5);
    }
}

TEST_CASE("neural margins and gradients") {
    net::MlpModel model = net::MlpModel::create(2, 2, 32, 4);
    net::set_spec_normalization(model, kSpec);
    Rng rng(2);
    const Eigen::Vector2d q0(0.3, -0.5), qd0(0.2, 0.1);
    CHECK(neural_margins(model, q0, qd0, Eigen::Vector2d::Zero(), {}, 0.03).value.size() == 0);

    std::vector<exact::Obstacle> obstacles;
    for (int i = 0; i < 4; ++i) obstacles.push_back({oracle::uniform_vec(rng, 2, -1, 1), kSpec.obstacle_side});
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd k = oracle::uniform_vec(rng, 2, -0.9, 0.9);
        const Margins m = neural_margins(model, q0, qd0, k, obstacles, 0.03);
        for (std::size_t o = 0; o < obstacles.size(); ++o) {
            Eigen::VectorXd x(8);
            x << q0, qd0, k, obstacles[o].center;
            CHECK(m.value[static_cast<Eigen::Index>(o)] == doctest::Approx(model.forward(x).minCoeff() - 0.03).epsilon(1e-12));
        }
        const Eigen::MatrixXd fd = fd_jacobian(
            [&](const Eigen::VectorXd& x) { return neural_margins(model, q0, qd0, x, obstacles, 0.03, false).value; }, k, 1e-6);
        for (Eigen::Index r = 0; r < m.grad.rows(); ++r)
            for (Eigen::Index c = 0; c < 2; ++c) CHECK(oracle::rel_error(m.grad(r, c), fd(r, c), 1e-2) <= 1e-5);
    }
}

TEST_CASE("exact margin is negative on the swept set") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = oracle::random_state(kSpec, rng);
        const arm::ReachSet reach(kSpec, s.q0, s.qd0);
        const auto tp = arm::TrajectoryParams::from_spec(kSpec, s.q0, s.qd0, s.k);
        const auto poses = arm::fk_point(kSpec, arm::desired_traj_eval(tp, rng.uniform(0, 1)).q);
        const exact::Obstacle o{arm::link_occupancy(kSpec, poses, 1).center(), kSpec.obstacle_side};
        const ExactCollisionConstraints c(reach, {o}, 0.0);
        CHECK(c.values(s.k)[0] < 0);
        const exact::Obstacle far{Eigen::Vector2d(5, 5), kSpec.obstacle_side};
        const ExactCollisionConstraints cf(reach, {far}, 0.0);
        CHECK(cf.values(s.k)[0] > 3);
    }
}

TEST_CASE("solver on a small constrained problem") {
    // min |k - (1, 1)|^2 s.t. 0.5 - k0 - k1 >= 0: optimum (0.25, 0.25).
    NlpProblem p;
    p.n = 2;
    p.cost = [](const Eigen::VectorXd& k, Eigen::VectorXd* g) {
        const Eigen::VectorXd d = k - Eigen::Vector2d(1, 1);
        if (g) *g = 2 * d;
        return d.squaredNorm();
    };
    p.cost_hessian = [](const Eigen::VectorXd&) { return Eigen::MatrixXd(2 * Eigen::Matrix2d::Identity()); };
    p.constraints = [](const Eigen::VectorXd& k, bool grad) {
        Margins m;
        m.value = Eigen::VectorXd::Constant(1, 0.5 - k.sum());
        if (grad) m.grad = Eigen::RowVector2d(-1, -1);
        return m;
    };
    const SolveOutcome out = solve_augmented_lagrangian(p, {Eigen::Vector2d::Zero()});
    REQUIRE(out.status == SolveStatus::feasible);
    CHECK((out.k - Eigen::Vector2d(0.25, 0.25)).norm() < 1e-4);
    CHECK(out.min_margin >= 0);

    // Unconstrained minimizer clipped to the box.
    CHECK((minimize_box(p, Eigen::Vector2d::Zero()) - Eigen::Vector2d(1, 1)).norm() < 1e-9);

    // Empty feasible set inside the box.
    p.constraints = [](const Eigen::VectorXd& k, bool grad) {
        Margins m;
        m.value = Eigen::VectorXd::Constant(1, -3 - k.sum());
        if (grad) m.grad = Eigen::RowVector2d(-1, -1);
        return m;
    };
    CHECK(solve_augmented_lagrangian(p, {Eigen::Vector2d::Zero()}).status == SolveStatus::infeasible);
}

TEST_CASE("planning step at the goal keeps still") {
    const Eigen::Vector2d q(0.4, -0.6);
    const PlanProblem p = problem_for(q, q, {});
    const SolveOutcome s = solve_iteration(p, nullptr, q, Eigen::Vector2d::Zero(), q);
    REQUIRE(s.status == SolveStatus::feasible);
    CHECK(s.k.norm() < 1e-9);
    CHECK(s.cost < 1e-18);
    CHECK(s.min_margin > 0);
}

TEST_CASE("a distant obstacle leaves the step unchanged") {
    const Eigen::Vector2d q(0.1, 0.3), w(0.5, -0.1);
    const PlanProblem free = problem_for(q, w, {});
    const PlanProblem far = problem_for(q, w, {{Eigen::Vector2d(0.97, -0.97), kSpec.obstacle_side}});
    const auto a = solve_iteration(free, nullptr, q, Eigen::Vector2d(0.2, 0), w);
    const auto b = solve_iteration(far, nullptr, q, Eigen::Vector2d(0.2, 0), w);
    REQUIRE(a.status == SolveStatus::feasible);
    REQUIRE(b.status == SolveStatus::feasible);
    CHECK((a.k - b.k).norm() < 1e-9);
}

TEST_CASE("a wall around the arm blocks every step") {
    const auto wall = hugging_wall(1e-4);
    CHECK(!in_collision(kSpec, Eigen::Vector2d::Zero(), wall));
    const PlanProblem p = problem_for(Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 0.5), wall);
    const auto s = solve_iteration(p, nullptr, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), Eigen::Vector2d(0.5, 0.25));
    CHECK(s.status == SolveStatus::infeasible);

    const PlanResult r = receding_horizon(p);
    CHECK(r.status == PlanStatus::stuck);
    CHECK(r.violations.empty());
    CHECK(r.executed.back().qd.norm() == 0.0);
    CHECK((r.executed.back().q - Eigen::Vector2d::Zero()).norm() == 0.0);
}

TEST_CASE("receding horizon in free space") {
    PlanProblem p = problem_for(Eigen::Vector2d(0.2, 0.1), Eigen::Vector2d(0.9, -0.4), {});
    const PlanResult r = receding_horizon(p);
    CHECK(r.status == PlanStatus::reached);
    CHECK(r.steps <= 6);
    CHECK(r.violations.empty());
    CHECK(r.executed.back().qd.norm() == 0.0);
    CHECK((r.terminal_q - p.q_goal).norm() < 0.1);
    // Distance to the goal never grows between replanning steps until success.
    double last = 1e9;
    for (const auto& s : r.executed) {
        if (std::abs(std::fmod(s.t, kSpec.timing.t_p)) > 1e-9) continue;
        const double d = (s.q - p.q_goal).norm();
        CHECK(d <= last + 1e-12);
        last = d;
        if (d < p.goal_tolerance) break;
    }
    // Executed samples are 1 ms apart and continuous.
    for (std::size_t i = 1; i < r.executed.size(); ++i) {
        CHECK(r.executed[i].t - r.executed[i - 1].t == doctest::Approx(kSampleDt).epsilon(1e-6));
        CHECK((r.executed[i].q - r.executed[i - 1].q).norm() < 0.01);
    }

    const PlanResult same = receding_horizon(problem_for(p.q_goal, p.q_goal, {}));
    CHECK(same.status == PlanStatus::reached);
    CHECK(same.steps == 0);
}

TEST_CASE("receding horizon toward an obstructed goal stays safe") {
    const Eigen::Vector2d goal(1.2, 0.3);
    const auto poses = arm::fk_point(kSpec, goal);
    // An obstacle right on the goal pose's second link.
    const std::vector<exact::Obstacle> obstacles = {{arm::link_occupancy(kSpec, poses, 1).center(), kSpec.obstacle_side}};
    PlanProblem p = problem_for(Eigen::Vector2d(-0.5, 0.2), goal, obstacles);
    p.max_steps = 60;
    const PlanResult r = receding_horizon(p);
    CHECK(r.status != PlanStatus::collided);
    CHECK(!in_collision(kSpec, r.terminal_q, obstacles));
    CHECK(r.violations.empty());
    CHECK(r.executed.back().qd.norm() == 0.0);
}

TEST_CASE("collision audit") {
    const std::vector<TrajectorySample> still = {{0.0, Eigen::Vector2d(0.3, 0.2), Eigen::Vector2d::Zero()}};
    CHECK(collision_audit(kSpec, still, {{Eigen::Vector2d(-0.9, -0.9), kSpec.obstacle_side}}).empty());
    const auto poses = arm::fk_point(kSpec, still[0].q);
    const Eigen::Vector2d mid = arm::link_occupancy(kSpec, poses, 1).center();
    const auto hits = collision_audit(kSpec, still, {{mid, kSpec.obstacle_side}});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].link == 1);
    CHECK(hits[0].obstacle == 0);
}

TEST_CASE("box overlap agrees with the polygon reference") {
    Rng rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const double angle = rng.uniform(-3.2, 3.2);
        const Eigen::Matrix2d rot = Eigen::Rotation2Dd(angle).toRotationMatrix();
        const Eigen::Vector2d c = oracle::uniform_vec(rng, 2, -0.3, 0.3), r(rng.uniform(0.01, 0.3), rng.uniform(0.001, 0.1));
        const pz::Zonotope link(c, rot * Eigen::Vector2d(r).asDiagonal().toDenseMatrix());
        const exact::Obstacle o{oracle::uniform_vec(rng, 2, -0.4, 0.4), rng.uniform(0.02, 0.2)};
        std::vector<Eigen::Vector2d> poly;
        for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) poly.push_back(c + rot * Eigen::Vector2d(sx * r.x(), sy * r.y()));
        CHECK(boxes_overlap(link, o) == oracle::polygons_overlap(poly, oracle::square(o.center, o.side)));
    }
}

TEST_CASE("audit hits imply a negative distance for the executed plan") {
    Rng rng(6);
    int hits = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = oracle::random_state(kSpec, rng);
        const auto tp = arm::TrajectoryParams::from_spec(kSpec, s.q0, s.qd0, s.k);
        // Obstacle near the swept path so hits are common.
        const auto mid = arm::fk_point(kSpec, arm::desired_traj_eval(tp, rng.uniform(0, 1)).q);
        const exact::Obstacle o{mid[1].p + oracle::uniform_vec(rng, 2, -0.15, 0.15), kSpec.obstacle_side};
        std::vector<TrajectorySample> samples;
        for (int m = 0; m <= 1000; ++m) {
            const auto st = arm::desired_traj_eval(tp, m / 1000.0);
            samples.push_back({m / 1000.0, st.q, st.qd});
        }
        const auto audit = collision_audit(kSpec, samples, {o});
        if (audit.empty()) continue;
        ++hits;
        const auto r = exact::rdf_ground_truth(kSpec, s.q0, s.qd0, s.k, o);
        for (const auto& h : audit) CHECK(r.link_distances[static_cast<std::size_t>(h.link)] < 0);
    }
    CHECK(hits > 20);
}

TEST_CASE("problem validation") {
    PlanProblem p = problem_for(Eigen::Vector2d::Zero(), Eigen::Vector3d::Zero(), {});
    CHECK_THROWS(p.validate());
    p = problem_for(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), {});
    p.goal_tolerance = 0;
    CHECK_THROWS(p.validate());
    CHECK(parse_mode("neural") == ConstraintMode::neural);
    CHECK(to_string(PlanStatus::stuck) == "stuck");
    CHECK_THROWS(parse_mode("other"));
    // Neural mode needs a model.
    p = problem_for(Eigen::Vector2d::Zero(), Eigen::Vector2d(0.5, 0), {});
    p.mode = ConstraintMode::neural;
    CHECK_THROWS(receding_horizon(p));
}
