#include "rdf/exact/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <stdexcept>
#include <vector>

namespace rdf::exact {

namespace {

constexpr double kInflate = 1e-9;

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain; nullopt when fewer than three hull vertices remain.
std::optional<ConvexPolytope> hull2d(const Eigen::MatrixXd& pts) {
    const auto n = pts.cols();
    std::vector<Eigen::Vector2d> p(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = pts.col(i);
    std::sort(p.begin(), p.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return std::nullopt;

    std::vector<Eigen::Vector2d> h(2 * p.size());
    std::size_t k = 0;
    for (const auto& q : p) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], q) <= 0) --k;
        h[k++] = q;
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross2(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    if (h.size() < 3) return std::nullopt;

    ConvexPolytope out;
    out.dim = 2;
    out.vertices.resize(2, static_cast<Eigen::Index>(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) {
        out.vertices.col(static_cast<Eigen::Index>(i)) = h[i];
        const Eigen::Vector2d e = h[(i + 1) % h.size()] - h[i];
        Eigen::Vector2d nrm(e.y(), -e.x());
        nrm.normalize();
        out.halfspaces.push_back({nrm, nrm.dot(h[i])});
    }
    return out;
}

struct Face {
    std::array<int, 3> v;
    Eigen::Vector3d n;
    double d;
    bool alive = true;
};

Face make_face(const std::vector<Eigen::Vector3d>& p, int a, int b, int c) {
    Eigen::Vector3d n = (p[static_cast<std::size_t>(b)] - p[static_cast<std::size_t>(a)])
                            .cross(p[static_cast<std::size_t>(c)] - p[static_cast<std::size_t>(a)]);
    n.normalize();
    return {{a, b, c}, n, n.dot(p[static_cast<std::size_t>(a)])};
}

// Incremental hull with triangle faces; nullopt for (near) coplanar input.
std::optional<ConvexPolytope> hull3d(const Eigen::MatrixXd& pts) {
    const auto n = static_cast<int>(pts.cols());
    std::vector<Eigen::Vector3d> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = pts.col(i);
    if (n < 4) return std::nullopt;

    const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
    const double eps = 1e-12 * scale;

    auto at = [&](int i) -> const Eigen::Vector3d& { return p[static_cast<std::size_t>(i)]; };
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (at(i).x() < at(i0).x()) i0 = i;
    int i1 = -1;
    double best = 0;
    for (int i = 0; i < n; ++i)
        if (double d = (at(i) - at(i0)).norm(); d > best) best = d, i1 = i;
    if (i1 < 0 || best <= 100 * eps) return std::nullopt;
    const Eigen::Vector3d dir = (at(i1) - at(i0)).normalized();
    int i2 = -1;
    best = 0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d r = at(i) - at(i0);
        if (double d = (r - r.dot(dir) * dir).norm(); d > best) best = d, i2 = i;
    }
    if (i2 < 0 || best <= 100 * eps) return std::nullopt;
    const Eigen::Vector3d pn = (at(i1) - at(i0)).cross(at(i2) - at(i0)).normalized();
    int i3 = -1;
    best = 0;
    for (int i = 0; i < n; ++i)
        if (double d = std::abs(pn.dot(at(i) - at(i0))); d > best) best = d, i3 = i;
    if (i3 < 0 || best <= 100 * eps) return std::nullopt;

    std::vector<Face> faces;
    // Directed edge (a, b) -> face holding it; the twin (b, a) is the neighbor.
    std::unordered_map<std::uint64_t, int> owner;
    auto key = [](int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); };
    const Eigen::Vector3d inner = 0.25 * (at(i0) + at(i1) + at(i2) + at(i3));
    auto add = [&](int a, int b, int c) {
        Face f = make_face(p, a, b, c);
        if (f.n.dot(inner) - f.d > 0) {
            std::swap(b, c);
            f = make_face(p, a, b, c);
        }
        const int id = static_cast<int>(faces.size());
        faces.push_back(f);
        owner[key(a, b)] = id;
        owner[key(b, c)] = id;
        owner[key(c, a)] = id;
    };
    add(i0, i1, i2);
    add(i0, i1, i3);
    add(i0, i2, i3);
    add(i1, i2, i3);

    // Farthest points first so most of the cloud ends up inside early.
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (int i : order) dist[static_cast<std::size_t>(i)] = (at(i) - inner).squaredNorm();
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[static_cast<std::size_t>(a)] > dist[static_cast<std::size_t>(b)]; });

    std::vector<int> stack, visible;
    std::vector<std::pair<int, int>> horizon;
    std::vector<char> seen;
    for (int i : order) {
        const Eigen::Vector3d& q = at(i);
        int start = -1;
        double far = eps;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive) continue;
            if (double h = faces[f].n.dot(q) - faces[f].d; h > far) far = h, start = static_cast<int>(f);
        }
        if (start < 0) continue;
        // Grow the visible region from the most visible face so it stays connected.
        seen.assign(faces.size(), 0);
        visible.clear();
        horizon.clear();
        stack.assign(1, start);
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int f = stack.back();
            stack.pop_back();
            visible.push_back(f);
            const auto& v = faces[static_cast<std::size_t>(f)].v;
            for (int e = 0; e < 3; ++e) {
                const int a = v[static_cast<std::size_t>(e)], b = v[static_cast<std::size_t>((e + 1) % 3)];
                const int nb = owner.at(key(b, a));
                const Face& g = faces[static_cast<std::size_t>(nb)];
                if (g.n.dot(q) - g.d > eps) {
                    if (!seen[static_cast<std::size_t>(nb)]) {
                        seen[static_cast<std::size_t>(nb)] = 1;
                        stack.push_back(nb);
                    }
                } else {
                    horizon.emplace_back(a, b);
                }
            }
        }
        for (int f : visible) {
            Face& face = faces[static_cast<std::size_t>(f)];
            face.alive = false;
            for (int e = 0; e < 3; ++e)
                owner.erase(key(face.v[static_cast<std::size_t>(e)], face.v[static_cast<std::size_t>((e + 1) % 3)]));
        }
        for (const auto& [a, b] : horizon) {
            const int id = static_cast<int>(faces.size());
            faces.push_back(make_face(p, a, b, i));
            owner[key(a, b)] = id;
            owner[key(b, i)] = id;
            owner[key(i, a)] = id;
        }
    }

    ConvexPolytope out;
    out.dim = 3;
    std::vector<int> remap(static_cast<std::size_t>(n), -1);
    int nv = 0;
    for (const Face& f : faces) {
        if (!f.alive) continue;
        for (int v : f.v)
            if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = nv++;
    }
    out.vertices.resize(3, nv);
    for (int i = 0; i < n; ++i)
        if (remap[static_cast<std::size_t>(i)] >= 0) out.vertices.col(remap[static_cast<std::size_t>(i)]) = at(i);
    for (const Face& f : faces) {
        if (!f.alive) continue;
        out.faces.push_back({remap[static_cast<std::size_t>(f.v[0])], remap[static_cast<std::size_t>(f.v[1])],
                             remap[static_cast<std::size_t>(f.v[2])]});
        out.halfspaces.push_back({f.n, f.d});
    }
    return out;
}

Eigen::MatrixXd inflate(const Eigen::MatrixXd& pts) {
    const auto d = pts.rows();
    const Eigen::Index corners = Eigen::Index{1} << d;
    Eigen::MatrixXd out(d, pts.cols() * corners);
    for (Eigen::Index i = 0; i < pts.cols(); ++i)
        for (Eigen::Index c = 0; c < corners; ++c) {
            Eigen::VectorXd q = pts.col(i);
            for (Eigen::Index r = 0; r < d; ++r) q[r] += ((c >> r) & 1) ? kInflate : -kInflate;
            out.col(i * corners + c) = q;
        }
    return out;
}

}  // namespace

ConvexPolytope convex_hull(const Eigen::MatrixXd& points) {
    if (points.rows() != 2 && points.rows() != 3) throw std::invalid_argument("convex_hull: need 2 or 3 rows");
    if (points.cols() == 0) throw std::invalid_argument("convex_hull: no points");
    auto run = [&](const Eigen::MatrixXd& pts) { return points.rows() == 2 ? hull2d(pts) : hull3d(pts); };
    if (auto h = run(points)) return *h;
    if (auto h = run(inflate(points))) return *h;
    throw std::runtime_error("convex_hull: degenerate input survived inflation");
}

}  // namespace rdf::exact
