#include "rdf/exact/rdf_ground_truth.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "rdf/arm/trajectory.hpp"
#include "rdf/exact/hull.hpp"
#include "rdf/exact/zonotope_distance.hpp"

namespace rdf::exact {

pz::Zonotope Obstacle::zonotope() const {
    return pz::Zonotope::box(center, Eigen::VectorXd::Constant(center.size(), 0.5 * side));
}

double RdfResult::min() const {
    if (link_distances.empty()) throw std::logic_error("RdfResult: no links");
    return *std::min_element(link_distances.begin(), link_distances.end());
}

std::vector<ConvexPolytope> buffered_hulls(const arm::ReachSet& reach, const Eigen::VectorXd& k,
                                           double obstacle_side) {
    const arm::RobotSpec& spec = reach.spec();
    const int n_d = spec.n_d;
    if (k.size() != spec.n_q()) throw std::invalid_argument("buffered_hulls: k has the wrong size");
    if ((k.array().abs() > 1.0).any()) throw std::domain_error("buffered_hulls: |k_j| > 1");
    const Eigen::MatrixXd obstacle_gens = Eigen::MatrixXd::Identity(n_d, n_d) * (0.5 * obstacle_side);
    const auto subs = arm::param_substitutions(k);

    std::vector<ConvexPolytope> out;
    out.reserve(static_cast<std::size_t>(spec.n_q()));
    std::vector<Eigen::MatrixXd> clouds(static_cast<std::size_t>(reach.num_cells()));
    for (int j = 0; j < spec.n_q(); ++j) {
        Eigen::Index total = 0;
        for (int i = 0; i < reach.num_cells(); ++i) {
            pz::PolyZonotope sliced = slice(reach.fo(i, j), subs);
            if (n_d == 3) {
                // keep at most kMaxGenerators3d generators after buffering
                pz::IdRegistry scratch = pz::IdRegistry::after(sliced);
                sliced = reduce(sliced, static_cast<std::size_t>(kMaxGenerators3d - 2 * n_d), scratch);
            }
            const pz::Zonotope fo = to_zonotope(sliced);
            const pz::Zonotope buffered(fo.center(), (Eigen::MatrixXd(n_d, fo.num_generators() + n_d)
                                                      << fo.generators(), obstacle_gens)
                                                         .finished());
            clouds[static_cast<std::size_t>(i)] = zono_vertices(buffered);
            total += clouds[static_cast<std::size_t>(i)].cols();
        }
        Eigen::MatrixXd all(n_d, total);
        Eigen::Index at = 0;
        for (const auto& c : clouds) {
            all.middleCols(at, c.cols()) = c;
            at += c.cols();
        }
        out.push_back(convex_hull(all));
    }
    return out;
}

RdfResult rdf_from_hulls(const std::vector<ConvexPolytope>& hulls, const Eigen::VectorXd& obstacle_center) {
    RdfResult r;
    r.link_distances.reserve(hulls.size());
    for (const auto& h : hulls) r.link_distances.push_back(signed_distance(obstacle_center, h));
    r.polytopes = hulls;
    return r;
}

RdfResult rdf_ground_truth(const arm::ReachSet& reach, const Eigen::VectorXd& k, const Obstacle& obstacle) {
    if (obstacle.center.size() != reach.spec().n_d) throw std::invalid_argument("rdf_ground_truth: obstacle dimension");
    return rdf_from_hulls(buffered_hulls(reach, k, obstacle.side), obstacle.center);
}

RdfResult rdf_ground_truth(const arm::RobotSpec& spec, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                           const Eigen::VectorXd& k, const Obstacle& obstacle) {
    const arm::ReachSet reach(spec, q0, qd0);
    return rdf_ground_truth(reach, k, obstacle);
}

}  // namespace rdf::exact
