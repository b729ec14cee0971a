#include <doctest.h>

#include <cmath>

#include "rdf/arm/kinematics.hpp"
#include "rdf/exact/hull.hpp"
#include "rdf/exact/polytope.hpp"
#include "rdf/exact/rdf_ground_truth.hpp"
#include "rdf/exact/zonotope_distance.hpp"
#include "support/oracles.hpp"

using namespace rdf;
using namespace rdf::exact;

namespace {

pz::Zonotope random_zono(Rng& rng, int max_gens = 4) {
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_gens)));
    Eigen::MatrixXd g(2, m);
    for (int i = 0; i < m; ++i) g.col(i) = oracle::uniform_vec(rng, 2, -1, 1);
    return {oracle::uniform_vec(rng, 2, -2, 2), g};
}

pz::Zonotope unit_box(double x, double y) { return pz::Zonotope::box(Eigen::Vector2d(x, y), Eigen::Vector2d(1, 1)); }

ConvexPolytope square_polytope() {
    Eigen::MatrixXd v(2, 4);
    v << -1, 1, 1, -1, -1, -1, 1, 1;
    return convex_hull(v);
}

std::vector<Eigen::Vector2d> columns(const Eigen::MatrixXd& m) {
    std::vector<Eigen::Vector2d> out;
    for (Eigen::Index i = 0; i < m.cols(); ++i) out.emplace_back(m.col(i));
    return out;
}

// Number of facets of a 3D cloud in general position, by testing every triple.
int brute_force_facets(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.cols();
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            for (Eigen::Index k = j + 1; k < n; ++k) {
                const Eigen::Vector3d a = p.col(i), nrm = (Eigen::Vector3d(p.col(j)) - a).cross(Eigen::Vector3d(p.col(k)) - a);
                int pos = 0, neg = 0;
                for (Eigen::Index m = 0; m < n; ++m) {
                    const double s = nrm.dot(Eigen::Vector3d(p.col(m)) - a);
                    pos += s > 1e-12;
                    neg += s < -1e-12;
                }
                count += pos == 0 || neg == 0;
            }
    return count;
}

arm::RobotSpec point_link_spec() {
    arm::RobotSpec s = arm::RobotSpec::planar(1);
    s.joints[0].offset = Eigen::Vector2d::Zero();
    s.joints[0].link = pz::Zonotope(Eigen::Vector2d::Zero());
    s.obstacle_side = 0.2;
    return s;
}

}  // namespace

TEST_CASE("zonotope intersection") {
    CHECK(!zono_intersects(unit_box(0, 0), unit_box(3, 0)));
    CHECK(zono_intersects(unit_box(0, 0), unit_box(1, 0)));
    CHECK(zono_intersects(unit_box(0, 0), unit_box(2, 0)));  // touching
}

TEST_CASE("zonotope intersection agrees with sampled overlap") {
    Rng rng(1);
    int cases = 0, skipped = 0;
    while (cases < 1000) {
        const auto a = random_zono(rng), b = random_zono(rng);
        Eigen::MatrixXd all(2, a.num_generators() + b.num_generators());
        all << a.generators(), b.generators();
        const double sd = oracle::support_signed_distance_2d(a.center(), b.center(), all, 4000);
        if (std::abs(sd) < 1e-2) {  // too close to touching for a sampling oracle
            ++skipped;
            continue;
        }
        const bool overlap = oracle::sampled_overlap(a.center(), a.generators(), b.center(), b.generators(), rng);
        CHECK(zono_intersects(a, b) == overlap);
        ++cases;
    }
    CHECK(skipped < 100);
}

TEST_CASE("zonotope signed distance") {
    CHECK(zono_signed_distance(unit_box(0, 0), unit_box(3, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zono_signed_distance(unit_box(0, 0), unit_box(1, 0)) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(zono_signed_distance(unit_box(0, 0), unit_box(3, 3)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    Rng rng(2);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_zono(rng), b = random_zono(rng);
        Eigen::MatrixXd all(2, a.num_generators() + b.num_generators());
        all << a.generators(), b.generators();
        const double expect = oracle::support_signed_distance_2d(a.center(), b.center(), all);
        CHECK(std::abs(zono_signed_distance(a, b) - expect) <= 2e-2);
        // Symmetric by construction.
        CHECK(zono_signed_distance(a, b) == doctest::Approx(zono_signed_distance(b, a)).epsilon(1e-9));
    }
}

TEST_CASE("zonotope vertices") {
    const auto sq = zono_vertices(pz::Zonotope(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()));
    REQUIRE(sq.cols() == 4);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK((sq.col(i).cwiseAbs() - Eigen::Vector2d(1, 1)).norm() < 1e-15);
    CHECK(zono_vertices(pz::Zonotope(Eigen::Vector2d(1, 2))).cols() == 1);

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto z = random_zono(rng, 6);
        std::vector<Eigen::Vector2d> cloud;
        for (int s = 0; s < 100000; ++s) {
            Eigen::VectorXd beta(z.num_generators());
            for (auto& x : beta) x = rng.below(2) ? 1.0 : -1.0;
            cloud.emplace_back(z.center() + z.generators() * beta);
        }
        const auto ref = oracle::monotone_chain(cloud);
        const auto mine = columns(zono_vertices(z));
        CHECK(mine.size() == ref.size());
        for (const auto& v : mine) {
            double best = 1e9;
            for (const auto& r : ref) best = std::min(best, (v - r).norm());
            CHECK(best <= 1e-9);
        }
    }
}

TEST_CASE("convex hull") {
    const auto sq = square_polytope();
    CHECK(sq.halfspaces.size() == 4);
    for (const auto& h : sq.halfspaces) {
        CHECK(h.a.norm() == doctest::Approx(1.0));
        CHECK(h.b / h.a.norm() == doctest::Approx(1.0));
    }
    Eigen::MatrixXd tri(2, 3);
    tri << 0, 1, 0, 0, 0, 1;
    CHECK(convex_hull(tri).halfspaces.size() == 3);

    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(40));
        Eigen::MatrixXd pts(2, n);
        for (int i = 0; i < n; ++i) pts.col(i) = oracle::uniform_vec(rng, 2, -1, 1);
        const auto hull = convex_hull(pts);
        CHECK(hull.halfspaces.size() == oracle::monotone_chain(columns(pts)).size());
        for (int i = 0; i < n; ++i) CHECK(hull.contains(pts.col(i)));
    }
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4 + static_cast<int>(rng.below(25));
        Eigen::MatrixXd pts(3, n);
        for (int i = 0; i < n; ++i) pts.col(i) = oracle::uniform_vec(rng, 3, -1, 1);
        const auto hull = convex_hull(pts);
        CHECK(static_cast<int>(hull.halfspaces.size()) == brute_force_facets(pts));
        for (int i = 0; i < n; ++i) CHECK(hull.contains(pts.col(i)));
    }
}

TEST_CASE("degenerate clouds still give a polytope") {
    Eigen::MatrixXd line(2, 3);
    line << 0, 1, 2, 0, 1, 2;
    const auto h = convex_hull(line);
    CHECK(h.contains(Eigen::Vector2d(1, 1)));
    CHECK(!h.contains(Eigen::Vector2d(1, 1.01)));
    Eigen::MatrixXd flat(3, 4);
    flat << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0;
    const auto f = convex_hull(flat);
    CHECK(f.contains(Eigen::Vector3d(0.5, 0.5, 0)));
    CHECK(!f.contains(Eigen::Vector3d(0.5, 0.5, 0.01)));
}

TEST_CASE("point to polytope distance") {
    const auto sq = square_polytope();
    CHECK(point_polytope_distance(Eigen::Vector2d(3, 0), sq) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(point_polytope_distance(Eigen::Vector2d(2, 2), sq) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS(point_polytope_distance(Eigen::Vector2d(0.5, 0), sq));

    Rng rng(5);
    for (int dim : {2, 3}) {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::MatrixXd pts(dim, 12);
            for (int i = 0; i < 12; ++i) pts.col(i) = oracle::uniform_vec(rng, dim, -1, 1);
            const auto hull = convex_hull(pts);
            Eigen::VectorXd c = oracle::uniform_vec(rng, dim, -3, 3);
            if (hull.contains(c, 1e-6)) continue;
            CHECK(std::abs(point_polytope_distance(c, hull) - oracle::qp_distance(hull.vertices, c)) <= 1e-8);
        }
    }
}

TEST_CASE("penetration distance") {
    const auto sq = square_polytope();
    CHECK(penetration_distance(Eigen::Vector2d(0.5, 0), sq) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS(penetration_distance(Eigen::Vector2d(3, 0), sq));
    Eigen::MatrixXd tri(2, 3);
    tri << 0, 1, 0, 0, 0, 1;
    const double inradius = (2 - std::sqrt(2.0)) / 2;
    // The incenter of this right triangle sits at (r, r).
    CHECK(penetration_distance(Eigen::Vector2d(inradius, inradius), convex_hull(tri)) ==
          doctest::Approx(inradius).epsilon(1e-14));
    // At the centroid the hypotenuse is nearest.
    CHECK(penetration_distance(Eigen::Vector2d(1.0 / 3, 1.0 / 3), convex_hull(tri)) ==
          doctest::Approx(1.0 / (3 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(oracle::sampled_boundary_distance(Eigen::Vector2d(inradius, inradius), columns(tri), 100000) ==
          doctest::Approx(inradius).epsilon(1e-4));

    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd pts(2, 10);
        for (int i = 0; i < 10; ++i) pts.col(i) = oracle::uniform_vec(rng, 2, -1, 1);
        const auto hull = convex_hull(pts);
        const Eigen::Vector2d c = hull.vertices.rowwise().mean();
        const double expect = oracle::sampled_boundary_distance(c, columns(hull.vertices));
        CHECK(std::abs(penetration_distance(c, hull) - expect) <= 2e-2);
        CHECK(signed_distance(c, hull) == doctest::Approx(-penetration_distance(c, hull)));
    }
}

TEST_CASE("rdf of a stationary point link") {
    const auto spec = point_link_spec();
    const Obstacle o{Eigen::Vector2d(1, 0), 0.2};
    const auto r = rdf_ground_truth(spec, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), o);
    REQUIRE(r.link_distances.size() == 1);
    CHECK(r.link_distances[0] == doctest::Approx(0.9).epsilon(1e-9));
    const Obstacle diag{Eigen::Vector2d(0.6, 0.6), 0.2};
    const auto d = rdf_ground_truth(spec, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), diag);
    CHECK(d.link_distances[0] == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-9));
    const Obstacle on{Eigen::Vector2d(0.05, 0), 0.2};
    const auto in = rdf_ground_truth(spec, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), on);
    CHECK(in.link_distances[0] == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("rdf is negative for an obstacle on the swept set") {
    Rng rng(7);
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = oracle::random_state(spec, rng);
        const arm::ReachSet reach(spec, s.q0, s.qd0);
        const auto hulls = buffered_hulls(reach, s.k, spec.obstacle_side);
        for (int m = 0; m < 10; ++m) {
            const double t = rng.uniform(0, 1);
            const auto state = arm::desired_traj_eval(arm::TrajectoryParams::from_spec(spec, s.q0, s.qd0, s.k), t);
            const auto boxes = oracle::planar_link_boxes(spec, state.q);
            const int j = static_cast<int>(rng.below(2));
            const auto& b = boxes[static_cast<std::size_t>(j)];
            const double u = rng.uniform(0, 1), v = rng.uniform(0, 1);
            const Eigen::Vector2d p = (1 - v) * ((1 - u) * b[0] + u * b[1]) + v * ((1 - u) * b[3] + u * b[2]);
            const auto r = rdf_from_hulls(hulls, p);
            CHECK(r.link_distances[static_cast<std::size_t>(j)] < 0);
            CHECK(r.link_distances[static_cast<std::size_t>(j)] <= -0.5 * spec.obstacle_side + 1e-9);
        }
    }
}

TEST_CASE("rdf never exceeds the sampled distance") {
    Rng rng(8);
    const arm::RobotSpec spec = arm::RobotSpec::planar(2);
    int checked = 0;
    while (checked < 20) {
        const auto s = oracle::random_state(spec, rng);
        const Obstacle o{oracle::uniform_vec(rng, 2, -1, 1), spec.obstacle_side};
        const auto tp = arm::TrajectoryParams::from_spec(spec, s.q0, s.qd0, s.k);
        std::vector<double> sampled(2, 1e9);
        for (int m = 0; m <= 1000; ++m) {
            const auto boxes = oracle::planar_link_boxes(spec, arm::desired_traj_eval(tp, m / 1000.0).q);
            for (int j = 0; j < 2; ++j)
                sampled[static_cast<std::size_t>(j)] =
                    std::min(sampled[static_cast<std::size_t>(j)],
                             oracle::polygon_distance(boxes[static_cast<std::size_t>(j)], oracle::square(o.center, o.side)));
        }
        if (std::min(sampled[0], sampled[1]) <= 0) continue;
        const auto r = rdf_ground_truth(spec, s.q0, s.qd0, s.k, o);
        for (int j = 0; j < 2; ++j) CHECK(r.link_distances[static_cast<std::size_t>(j)] <= sampled[static_cast<std::size_t>(j)] + 1e-9);
        ++checked;
    }
}

TEST_CASE("rdf in three dimensions") {
    const arm::RobotSpec spec = arm::RobotSpec::spatial7();
    Rng rng(9);
    const auto s = oracle::random_state(spec, rng);
    const arm::ReachSet reach(spec, s.q0, s.qd0);
    const auto hulls = buffered_hulls(reach, s.k, spec.obstacle_side);
    REQUIRE(hulls.size() == 7);
    const auto tp = arm::TrajectoryParams::from_spec(spec, s.q0, s.qd0, s.k);
    for (int m = 0; m < 50; ++m) {
        const auto poses = arm::fk_point(spec, arm::desired_traj_eval(tp, rng.uniform(0, 1)).q);
        for (int j = 0; j < 7; ++j) {
            const auto link = arm::link_occupancy(spec, poses, j);
            CHECK(rdf_from_hulls(hulls, link.center()).link_distances[static_cast<std::size_t>(j)] < 0);
        }
    }
    const auto far = rdf_from_hulls(hulls, Eigen::Vector3d(5, 5, 5));
    for (double d : far.link_distances) CHECK(d > 0);
}
