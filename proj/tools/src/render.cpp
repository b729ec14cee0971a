#include "rdf/cli/render.hpp"

#include <cstdio>
#include <stdexcept>

#include "rdf/exact/hull.hpp"
#include "rdf/exact/zonotope_distance.hpp"

namespace rdf::cli {

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 20.0;
constexpr double kLegend = 150.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

struct View {
    int u = 0, v = 1;
    double x0 = 0.0;  // panel offset
    std::string name;

    Eigen::Vector2d to_px(const Eigen::Vector2d& w) const {
        return {x0 + kMargin + (w.x() + 1.0) * 0.5 * kPanel, kMargin + (1.0 - w.y()) * 0.5 * kPanel};
    }
    Eigen::MatrixXd project(const Eigen::MatrixXd& m) const {
        Eigen::MatrixXd out(2, m.cols());
        out.row(0) = m.row(u);
        out.row(1) = m.row(v);
        return out;
    }
};

std::string polygon(const View& view, const Eigen::MatrixXd& pts2, const char* cls) {
    std::string s = "<polygon class=\"";
    s += cls;
    s += "\" points=\"";
    for (Eigen::Index i = 0; i < pts2.cols(); ++i) {
        const Eigen::Vector2d p = view.to_px(pts2.col(i));
        if (i) s += ' ';
        s += fmt(p.x()) + "," + fmt(p.y());
    }
    return s + "\"/>\n";
}

// Ordered outline of a projected point set.
Eigen::MatrixXd outline(const Eigen::MatrixXd& pts2) {
    if (pts2.cols() < 3) return pts2;
    return exact::convex_hull(pts2).vertices;
}

}  // namespace

Eigen::MatrixXd sample_grid(const std::function<double(double, double)>& f, int n, double lo, double hi) {
    if (n < 2) throw std::invalid_argument("sample_grid: need at least 2 nodes");
    Eigen::MatrixXd v(n, n);
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = f(lo + i * h, lo + j * h);
    return v;
}

std::vector<Segment> marching_squares(const Eigen::MatrixXd& values, double lo, double hi) {
    const Eigen::Index n = values.rows();
    if (n < 2 || values.cols() != n) throw std::invalid_argument("marching_squares: need a square grid");
    const double h = (hi - lo) / static_cast<double>(n - 1);
    std::vector<Segment> out;
    auto node = [&](Eigen::Index i, Eigen::Index j) { return Eigen::Vector2d(lo + i * h, lo + j * h); };
    // Crossing on the edge between two nodes.
    auto cross = [&](Eigen::Index i0, Eigen::Index j0, Eigen::Index i1, Eigen::Index j1) {
        const double a = values(i0, j0), b = values(i1, j1);
        const double t = a == b ? 0.5 : a / (a - b);
        return Eigen::Vector2d(node(i0, j0) + t * (node(i1, j1) - node(i0, j0)));
    };
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            // Corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1).
            const double c[4] = {values(i, j), values(i + 1, j), values(i + 1, j + 1), values(i, j + 1)};
            int mask = 0;
            for (int q = 0; q < 4; ++q)
                if (c[q] > 0) mask |= 1 << q;
            if (mask == 0 || mask == 15) continue;
            const Eigen::Vector2d e0 = cross(i, j, i + 1, j);          // bottom
            const Eigen::Vector2d e1 = cross(i + 1, j, i + 1, j + 1);  // right
            const Eigen::Vector2d e2 = cross(i, j + 1, i + 1, j + 1);  // top
            const Eigen::Vector2d e3 = cross(i, j, i, j + 1);          // left
            switch (mask) {
                case 1: case 14: out.push_back({e3, e0}); break;
                case 2: case 13: out.push_back({e0, e1}); break;
                case 3: case 12: out.push_back({e3, e1}); break;
                case 4: case 11: out.push_back({e1, e2}); break;
                case 6: case 9: out.push_back({e0, e2}); break;
                case 7: case 8: out.push_back({e3, e2}); break;
                case 5: case 10: {
                    const bool center_positive = (c[0] + c[1] + c[2] + c[3]) > 0;
                    if ((mask == 5) == center_positive) {
                        out.push_back({e3, e2});
                        out.push_back({e0, e1});
                    } else {
                        out.push_back({e3, e0});
                        out.push_back({e1, e2});
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return out;
}

std::string render_svg(const SceneRender& scene) {
    if (scene.n_d != 2 && scene.n_d != 3) throw std::invalid_argument("render_svg: workspace must be 2D or 3D");
    std::vector<View> views;
    if (scene.n_d == 2) {
        views.push_back({0, 1, 0.0, "xy"});
    } else {
        views.push_back({0, 1, 0.0, "xy"});
        views.push_back({0, 2, kPanel + 2 * kMargin, "xz"});
    }
    const double width = static_cast<double>(views.size()) * (kPanel + 2 * kMargin) + kLegend;
    const double height = kPanel + 2 * kMargin;
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
         "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";
    s += "<style>\n"
         ".frame{fill:#ffffff;stroke:#000000;stroke-width:1}\n"
         ".hull{fill:#9ecae1;fill-opacity:0.35;stroke:#3182bd;stroke-width:0.8}\n"
         ".link{fill:#636363;stroke:#252525;stroke-width:0.8}\n"
         ".obstacle{fill:#e6550d;fill-opacity:0.8;stroke:#a63603;stroke-width:0.8}\n"
         ".contour{stroke:#31a354;stroke-width:1.2;fill:none}\n"
         "text{font-family:sans-serif;font-size:12px}\n"
         "</style>\n";
    for (std::size_t vi = 0; vi < views.size(); ++vi) {
        const View& view = views[vi];
        const Eigen::Vector2d a = view.to_px({-1.0, 1.0});
        s += "<g id=\"view-" + view.name + "\">\n";
        s += "<rect class=\"frame\" x=\"" + fmt(a.x()) + "\" y=\"" + fmt(a.y()) + "\" width=\"" + fmt(kPanel) +
             "\" height=\"" + fmt(kPanel) + "\"/>\n";
        s += "<text x=\"" + fmt(a.x() + 4) + "\" y=\"" + fmt(a.y() + 14) + "\">" + view.name + "</text>\n";
        s += "<g id=\"hulls-" + view.name + "\">\n";
        for (const auto& h : scene.hulls) s += polygon(view, outline(view.project(h.vertices)), "hull");
        s += "</g>\n<g id=\"links-" + view.name + "\">\n";
        for (const auto& z : scene.links) {
            const pz::Zonotope flat(view.project(z.center()), view.project(z.generators()));
            s += polygon(view, exact::zono_vertices(flat.compacted()), "link");
        }
        s += "</g>\n<g id=\"obstacles-" + view.name + "\">\n";
        for (const auto& o : scene.obstacles) {
            const pz::Zonotope z = o.zonotope();
            const pz::Zonotope flat(view.project(z.center()), view.project(z.generators()));
            s += polygon(view, exact::zono_vertices(flat.compacted()), "obstacle");
        }
        s += "</g>\n<g id=\"contour-" + view.name + "\">\n";
        if (vi < scene.contours.size()) {
            for (const auto& seg : scene.contours[vi]) {
                const Eigen::Vector2d p = view.to_px(seg.a), q = view.to_px(seg.b);
                s += "<line class=\"contour\" x1=\"" + fmt(p.x()) + "\" y1=\"" + fmt(p.y()) + "\" x2=\"" + fmt(q.x()) +
                     "\" y2=\"" + fmt(q.y()) + "\"/>\n";
            }
        }
        s += "</g>\n</g>\n";
    }
    const double lx = static_cast<double>(views.size()) * (kPanel + 2 * kMargin) + 10.0;
    s += "<g id=\"legend\">\n";
    const char* names[4][2] = {
        {"link", "arm links"}, {"obstacle", "obstacles"}, {"hull", "reachable hulls"}, {"contour", "zero-level set"}};
    for (int i = 0; i < 4; ++i) {
        const double y = kMargin + 10.0 + 22.0 * i;
        if (std::string(names[i][0]) == "contour")
            s += "<line class=\"contour\" x1=\"" + fmt(lx) + "\" y1=\"" + fmt(y + 6) + "\" x2=\"" + fmt(lx + 14) +
                 "\" y2=\"" + fmt(y + 6) + "\"/>\n";
        else
            s += "<rect class=\"" + std::string(names[i][0]) + "\" x=\"" + fmt(lx) + "\" y=\"" + fmt(y) +
                 "\" width=\"14\" height=\"12\"/>\n";
        s += "<text x=\"" + fmt(lx + 20) + "\" y=\"" + fmt(y + 11) + "\">" + names[i][1] + "</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace rdf::cli
