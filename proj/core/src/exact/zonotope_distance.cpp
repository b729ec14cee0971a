#include "rdf/exact/zonotope_distance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rdf/exact/hull.hpp"

namespace rdf::exact {

namespace {

// Orthonormal basis of the generator span (columns) by SVD rank.
Eigen::MatrixXd span_basis(const Eigen::MatrixXd& g) {
    if (g.cols() == 0) return Eigen::MatrixXd(g.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double cut = std::max(1e-300, s.size() > 0 ? s[0] * 1e-12 : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > cut) ++r;
    return svd.matrixU().leftCols(r);
}

// Candidate facet normals of a full-dimensional zonotope in r dims.
std::vector<Eigen::VectorXd> facet_normals(const Eigen::MatrixXd& g) {
    std::vector<Eigen::VectorXd> out;
    const auto r = g.rows();
    if (r == 1) {
        out.push_back(Eigen::VectorXd::Ones(1));
    } else if (r == 2) {
        for (Eigen::Index i = 0; i < g.cols(); ++i) {
            Eigen::VectorXd n(2);
            n << -g(1, i), g(0, i);
            if (n.norm() > 0) out.push_back(n.normalized());
        }
    } else {
        for (Eigen::Index i = 0; i < g.cols(); ++i)
            for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
                const Eigen::Vector3d n = Eigen::Vector3d(g.col(i)).cross(Eigen::Vector3d(g.col(j)));
                if (n.norm() > 1e-14 * g.col(i).norm() * g.col(j).norm()) out.push_back(n.normalized());
            }
    }
    return out;
}

// 2D zonotope vertices by angular order of generators.
Eigen::MatrixXd vertices2d(const Eigen::Vector2d& c, const Eigen::MatrixXd& g) {
    std::vector<Eigen::Vector2d> gens;
    for (Eigen::Index i = 0; i < g.cols(); ++i) {
        Eigen::Vector2d v = g.col(i);
        if (v.norm() == 0) continue;
        if (v.y() < 0 || (v.y() == 0 && v.x() < 0)) v = -v;
        gens.push_back(v);
    }
    if (gens.empty()) return c;
    std::stable_sort(gens.begin(), gens.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });
    Eigen::Vector2d v = c;
    for (const auto& gi : gens) v -= gi;  // lowest vertex, start of the counter-clockwise walk
    Eigen::MatrixXd out(2, static_cast<Eigen::Index>(2 * gens.size()));
    Eigen::Index k = 0;
    for (const auto& gi : gens) {
        out.col(k++) = v;
        v += 2 * gi;
    }
    for (const auto& gi : gens) {
        out.col(k++) = v;
        v -= 2 * gi;
    }
    return out;
}

// 3D vertices: for each facet normal, the facet is the 2D zonotope of the
// generators lying in it, shifted by the signed sum of the others.
Eigen::MatrixXd vertices3d(const Eigen::Vector3d& c, const Eigen::MatrixXd& g) {
    std::vector<Eigen::Vector3d> pts;
    const auto normals = facet_normals(g);
    const double scale = g.colwise().norm().maxCoeff();
    for (const Eigen::VectorXd& nv : normals) {
        const Eigen::Vector3d n = nv;
        for (double side : {1.0, -1.0}) {
            Eigen::Vector3d base = c;
            std::vector<Eigen::Index> flat;
            for (Eigen::Index i = 0; i < g.cols(); ++i) {
                const double s = side * n.dot(g.col(i));
                if (std::abs(s) <= 1e-12 * scale) flat.push_back(i);
                else base += (s > 0 ? 1.0 : -1.0) * g.col(i);
            }
            const Eigen::Vector3d u = g.col(flat.front()).normalized();
            const Eigen::Vector3d w = n.cross(u).normalized();
            Eigen::MatrixXd g2(2, static_cast<Eigen::Index>(flat.size()));
            for (std::size_t i = 0; i < flat.size(); ++i) {
                const Eigen::Vector3d gi = g.col(flat[i]);
                g2.col(static_cast<Eigen::Index>(i)) << u.dot(gi), w.dot(gi);
            }
            const Eigen::MatrixXd v2 = vertices2d(Eigen::Vector2d::Zero(), g2);
            for (Eigen::Index k = 0; k < v2.cols(); ++k) pts.push_back(base + v2(0, k) * u + v2(1, k) * w);
        }
    }
    std::sort(pts.begin(), pts.end(), [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    });
    std::vector<Eigen::Vector3d> uniq;
    for (const auto& p : pts)
        if (uniq.empty() || (p - uniq.back()).norm() > 1e-12 * std::max(1.0, scale)) uniq.push_back(p);
    Eigen::MatrixXd out(3, static_cast<Eigen::Index>(uniq.size()));
    for (std::size_t i = 0; i < uniq.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = uniq[i];
    return out;
}

}  // namespace

bool zono_contains(const pz::Zonotope& z, const Eigen::VectorXd& p, double tol) {
    if (p.size() != z.dim()) throw std::invalid_argument("zono_contains: dimension mismatch");
    const Eigen::VectorXd d = p - z.center();
    const Eigen::MatrixXd u = span_basis(z.generators());
    if ((d - u * (u.transpose() * d)).norm() > tol) return false;
    if (u.cols() == 0) return true;
    const Eigen::VectorXd dl = u.transpose() * d;
    const Eigen::MatrixXd gl = u.transpose() * z.generators();
    for (const Eigen::VectorXd& n : facet_normals(gl)) {
        const double reach = (n.transpose() * gl).cwiseAbs().sum();
        if (std::abs(n.dot(dl)) > reach + tol) return false;
    }
    return true;
}

Eigen::MatrixXd zono_vertices(const pz::Zonotope& z) {
    if (z.dim() != 2 && z.dim() != 3) throw std::invalid_argument("zono_vertices: dimension must be 2 or 3");
    const pz::Zonotope zc = z.compacted();
    if (zc.num_generators() == 0) return zc.center();
    if (z.dim() == 2) return vertices2d(zc.center(), zc.generators());
    if (zc.num_generators() > kMaxGenerators3d)
        throw std::invalid_argument("zono_vertices: too many generators, reduce first");
    const Eigen::MatrixXd u = span_basis(zc.generators());
    if (u.cols() == 3) return vertices3d(zc.center(), zc.generators());
    // Flat zonotope: enumerate inside its span and lift back.
    const Eigen::MatrixXd gl = u.transpose() * zc.generators();
    Eigen::MatrixXd local;
    if (u.cols() == 2) {
        local = vertices2d(Eigen::Vector2d::Zero(), gl);
    } else {
        const double r = gl.cwiseAbs().sum();
        local.resize(1, 2);
        local << -r, r;
    }
    return (u * local).colwise() + zc.center();
}

ConvexPolytope zono_polytope(const pz::Zonotope& z) { return convex_hull(zono_vertices(z)); }

bool zono_intersects(const pz::Zonotope& z1, const pz::Zonotope& z2) {
    if (z1.dim() != z2.dim()) throw std::invalid_argument("zono_intersects: dimension mismatch");
    return zono_contains(z2.with_generators_of(z1), z1.center());
}

double zono_signed_distance(const pz::Zonotope& z1, const pz::Zonotope& z2) {
    if (z1.dim() != z2.dim()) throw std::invalid_argument("zono_signed_distance: dimension mismatch");
    return signed_distance(z1.center(), zono_polytope(z2.with_generators_of(z1)));
}

}  // namespace rdf::exact
