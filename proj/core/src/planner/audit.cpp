#include "rdf/planner/audit.hpp"

#include <stdexcept>

#include "rdf/arm/kinematics.hpp"

namespace rdf::planner {

namespace {

// Candidate separating axes of Z1 + (-Z2): generator normals in 2D, pairwise
// cross products in 3D.
std::vector<Eigen::VectorXd> separating_axes(const Eigen::MatrixXd& g) {
    std::vector<Eigen::VectorXd> axes;
    const Eigen::Index n = g.cols();
    if (g.rows() == 2) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Vector2d a(-g(1, i), g(0, i));
            if (a.squaredNorm() > 0) axes.emplace_back(a);
        }
    } else if (g.rows() == 3) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const Eigen::Vector3d a = Eigen::Vector3d(g.col(i)).cross(Eigen::Vector3d(g.col(j)));
                if (a.squaredNorm() > 1e-24 * g.col(i).squaredNorm() * g.col(j).squaredNorm()) axes.emplace_back(a);
            }
        // Degenerate (coplanar) sets still need the coordinate axes.
        for (int e = 0; e < 3; ++e) axes.emplace_back(Eigen::Vector3d::Unit(e));
    } else {
        throw std::invalid_argument("boxes_overlap: workspace must be 2D or 3D");
    }
    return axes;
}

}  // namespace

bool boxes_overlap(const pz::Zonotope& link, const exact::Obstacle& obstacle) {
    const pz::Zonotope o = obstacle.zonotope();
    if (link.dim() != o.dim()) throw std::invalid_argument("boxes_overlap: dimension mismatch");
    const Eigen::VectorXd d = link.center() - o.center();
    Eigen::MatrixXd g(link.dim(), link.num_generators() + o.num_generators());
    g << link.generators(), o.generators();
    for (const Eigen::VectorXd& a : separating_axes(g)) {
        const double reach = (a.transpose() * g).cwiseAbs().sum();
        if (std::abs(a.dot(d)) > reach) return false;
    }
    return true;
}

std::vector<AuditHit> collision_audit(const arm::RobotSpec& spec, const std::vector<TrajectorySample>& samples,
                                      const std::vector<exact::Obstacle>& obstacles) {
    std::vector<AuditHit> hits;
    if (obstacles.empty()) return hits;
    for (const TrajectorySample& s : samples) {
        const auto poses = arm::fk_point(spec, s.q);
        for (int j = 0; j < spec.n_q(); ++j) {
            const pz::Zonotope occ = arm::link_occupancy(spec, poses, j);
            for (std::size_t l = 0; l < obstacles.size(); ++l)
                if (boxes_overlap(occ, obstacles[l])) hits.push_back({s.t, j, static_cast<int>(l)});
        }
    }
    return hits;
}

bool in_collision(const arm::RobotSpec& spec, const Eigen::VectorXd& q, const std::vector<exact::Obstacle>& obstacles) {
    return !collision_audit(spec, {TrajectorySample{0.0, q, Eigen::VectorXd::Zero(q.size())}}, obstacles).empty();
}

}  // namespace rdf::planner
