#include <benchmark/benchmark.h>

#include "rdf/arm/reach_set.hpp"
#include "rdf/exact/hull.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/exact/zonotope_distance.hpp"
#include "rdf/net/mlp.hpp"
#include "rdf/net/train.hpp"
#include "rdf/planner/constraints.hpp"
#include "rdf/random.hpp"

using namespace rdf;

namespace {

Eigen::VectorXd draw(Rng& rng, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

void BM_ForwardInputGrad(benchmark::State& state) {
    const int width = static_cast<int>(state.range(0));
    net::MlpModel m = net::MlpModel::create(2, 2, width, 1);
    net::set_spec_normalization(m, arm::RobotSpec::planar(2));
    Rng rng(1);
    const Eigen::VectorXd x = draw(rng, m.input_dim(), -1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(net::mlp_input_grad(m, x));
}
BENCHMARK(BM_ForwardInputGrad)->Arg(128)->Arg(512)->Unit(benchmark::kMicrosecond);

// Neural constraints and k-Jacobian for a handful of obstacles.
void BM_NeuralMargins(benchmark::State& state) {
    net::MlpModel m = net::MlpModel::create(2, 2, 128, 2);
    net::set_spec_normalization(m, arm::RobotSpec::planar(2));
    Rng rng(2);
    std::vector<exact::Obstacle> obstacles;
    for (int i = 0; i < state.range(0); ++i) obstacles.push_back({draw(rng, 2, -1, 1), 0.083});
    const Eigen::Vector2d q0(0.1, 0.2), qd0(0.3, -0.1), k(0.2, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(planner::neural_margins(m, q0, qd0, k, obstacles, 0.03));
}
BENCHMARK(BM_NeuralMargins)->Arg(2)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_ReachSet(benchmark::State& state) {
    const arm::RobotSpec spec = arm::RobotSpec::planar(static_cast<int>(state.range(0)));
    Rng rng(3);
    const Eigen::VectorXd q0 = draw(rng, spec.n_q(), -1, 1), qd0 = draw(rng, spec.n_q(), -0.5, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(arm::ReachSet(spec, q0, qd0));
}
BENCHMARK(BM_ReachSet)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

// Exact distance including the reachable set, as a dataset label costs.
void BM_ExactRdf(benchmark::State& state) {
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    Rng rng(4);
    const Eigen::VectorXd q0 = draw(rng, 2, -1, 1), qd0 = draw(rng, 2, -0.5, 0.5), k = draw(rng, 2, -1, 1);
    const exact::Obstacle o{draw(rng, 2, -1, 1), spec.obstacle_side};
    for (auto _ : state) benchmark::DoNotOptimize(exact::rdf_ground_truth(spec, q0, qd0, k, o));
}
BENCHMARK(BM_ExactRdf)->Unit(benchmark::kMillisecond);

// Distance only, with the reachable set built once.
void BM_ExactRdfSliced(benchmark::State& state) {
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    Rng rng(5);
    const arm::ReachSet reach(spec, draw(rng, 2, -1, 1), draw(rng, 2, -0.5, 0.5));
    const Eigen::VectorXd k = draw(rng, 2, -1, 1);
    const exact::Obstacle o{draw(rng, 2, -1, 1), spec.obstacle_side};
    for (auto _ : state) benchmark::DoNotOptimize(exact::rdf_ground_truth(reach, k, o));
}
BENCHMARK(BM_ExactRdfSliced)->Unit(benchmark::kMillisecond);

void BM_ConvexHull(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0)), n = static_cast<int>(state.range(1));
    Rng rng(6);
    Eigen::MatrixXd pts(dim, n);
    for (int i = 0; i < n; ++i) pts.col(i) = draw(rng, dim, -1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(exact::convex_hull(pts));
}
BENCHMARK(BM_ConvexHull)->Args({2, 1000})->Args({3, 200})->Unit(benchmark::kMicrosecond);

void BM_ZonoSignedDistance(benchmark::State& state) {
    Rng rng(7);
    const pz::Zonotope a(draw(rng, 2, -1, 1), Eigen::MatrixXd::Random(2, 4)), b(draw(rng, 2, -1, 1), Eigen::MatrixXd::Random(2, 4));
    for (auto _ : state) benchmark::DoNotOptimize(exact::zono_signed_distance(a, b));
}
BENCHMARK(BM_ZonoSignedDistance)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
