#include "rdf/exact/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdf::exact {

namespace {

double point_segment(const Eigen::VectorXd& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * ab - p).norm();
}

// Closest-point on triangle, region tests from Ericson's Real-Time Collision Detection.
double point_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c) {
    const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return (p - a).norm();
    const Eigen::Vector3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
    const Eigen::Vector3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + w * (c - b))).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + ab * v + ac * w)).norm();
}

}  // namespace

double ConvexPolytope::max_violation(const Eigen::VectorXd& c) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Halfspace& h : halfspaces) worst = std::max(worst, (h.a.dot(c) - h.b) / h.a.norm());
    return worst;
}

double point_polytope_distance(const Eigen::VectorXd& c, const ConvexPolytope& p) {
    if (c.size() != p.dim) throw std::invalid_argument("point_polytope_distance: dimension mismatch");
    if (p.max_violation(c) <= 0.0) throw std::domain_error("point_polytope_distance: point lies inside");
    double best = std::numeric_limits<double>::infinity();
    const auto n = p.vertices.cols();
    if (p.dim == 2) {
        for (Eigen::Index i = 0; i < n; ++i)
            best = std::min(best, point_segment(c, p.vertices.col(i), p.vertices.col((i + 1) % n)));
    } else {
        const Eigen::Vector3d q = c;
        for (const auto& f : p.faces)
            best = std::min(best, point_triangle(q, p.vertices.col(f[0]), p.vertices.col(f[1]), p.vertices.col(f[2])));
    }
    return best;
}

double penetration_distance(const Eigen::VectorXd& c, const ConvexPolytope& p) {
    if (c.size() != p.dim) throw std::invalid_argument("penetration_distance: dimension mismatch");
    const double v = p.max_violation(c);
    if (v > 0.0) throw std::domain_error("penetration_distance: point lies outside");
    return -v;
}

double signed_distance(const Eigen::VectorXd& c, const ConvexPolytope& p) {
    const double v = p.max_violation(c);
    if (std::abs(v) <= kBoundaryTol) return 0.0;
    if (v > 0.0) {
        const double d = point_polytope_distance(c, p);
        return d <= kBoundaryTol ? 0.0 : d;
    }
    return v;
}

}  // namespace rdf::exact
