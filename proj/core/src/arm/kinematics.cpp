#include "rdf/arm/kinematics.hpp"

#include <cmath>
#include <stdexcept>

#include "rdf/arm/trajectory.hpp"

namespace rdf::arm {

using pz::IdRegistry;
using pz::MatPolyZonotope;
using pz::PolyZonotope;

namespace {

// Rodrigues split R(q) = cos q * A + sin q * B + C, cut to n_d rows/cols.
struct RotationParts {
    Eigen::MatrixXd a, b, c;
};

RotationParts rotation_parts(const RobotSpec& spec, int joint) {
    const Eigen::Vector3d& u = spec.joints.at(static_cast<std::size_t>(joint)).axis;
    const Eigen::Matrix3d outer = u * u.transpose();
    Eigen::Matrix3d cross;
    cross << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
    const int n = spec.n_d;
    const Eigen::Matrix3d a = Eigen::Matrix3d::Identity() - outer;
    return {a.topLeftCorner(n, n), cross.topLeftCorner(n, n), outer.topLeftCorner(n, n)};
}

}  // namespace

Eigen::MatrixXd joint_rotation(const RobotSpec& spec, int joint, double q) {
    const RotationParts r = rotation_parts(spec, joint);
    return std::cos(q) * r.a + std::sin(q) * r.b + r.c;
}

std::vector<FramePose> fk_point(const RobotSpec& spec, const Eigen::VectorXd& q) {
    if (q.size() != spec.n_q()) throw std::invalid_argument("fk_point: q has the wrong size");
    std::vector<FramePose> out;
    out.reserve(static_cast<std::size_t>(spec.n_q()));
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(spec.n_d, spec.n_d);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(spec.n_d);
    for (int j = 0; j < spec.n_q(); ++j) {
        R = R * joint_rotation(spec, j, q[j]);
        p = p + R * spec.joints[static_cast<std::size_t>(j)].offset;
        out.push_back({R, p});
    }
    return out;
}

pz::Zonotope link_occupancy(const RobotSpec& spec, const std::vector<FramePose>& poses, int joint) {
    const auto& pose = poses.at(static_cast<std::size_t>(joint));
    return spec.joints[static_cast<std::size_t>(joint)].link.transformed(pose.R).translated(pose.p);
}

MatPolyZonotope pz_joint_rotation(const RobotSpec& spec, int joint, const PolyZonotope& q, IdRegistry& registry,
                                  const PzOptions& options) {
    const RotationParts r = rotation_parts(spec, joint);
    const pz::SinCos sc = pz::sincos(q, options.taylor_degree, registry, options.budget);
    const PolyZonotope c = reduce(sc.cos, options.budget, registry);
    const PolyZonotope s = reduce(sc.sin, options.budget, registry);
    MatPolyZonotope out(spec.n_d, spec.n_d);
    for (int i = 0; i < spec.n_d; ++i)
        for (int k = 0; k < spec.n_d; ++k) {
            PolyZonotope e = PolyZonotope::constant(r.c(i, k));
            if (r.a(i, k) != 0.0) e = e + r.a(i, k) * c;
            if (r.b(i, k) != 0.0) e = e + r.b(i, k) * s;
            out(i, k) = std::move(e);
        }
    return out;
}

std::vector<PzFrame> pz_fk(const RobotSpec& spec, std::span<const PolyZonotope> q, IdRegistry& registry,
                           const PzOptions& options) {
    if (static_cast<int>(q.size()) != spec.n_q()) throw std::invalid_argument("pz_fk: q has the wrong size");
    std::vector<PzFrame> out;
    out.reserve(q.size());
    if (spec.n_d == 2) {
        // Planar chain: the product of rotations is the rotation by the summed angle.
        PolyZonotope theta = PolyZonotope::constant(0.0);
        PolyZonotope p(Eigen::VectorXd::Zero(2));
        for (int j = 0; j < spec.n_q(); ++j) {
            const Joint& jt = spec.joints[static_cast<std::size_t>(j)];
            theta = theta + jt.axis.z() * q[static_cast<std::size_t>(j)];
            const pz::SinCos sc = pz::sincos(theta, options.taylor_degree, registry, options.budget);
            const PolyZonotope s = reduce(sc.sin, options.budget, registry);
            const PolyZonotope c = reduce(sc.cos, options.budget, registry);
            MatPolyZonotope R(2, 2);
            R(0, 0) = c;
            R(0, 1) = -s;
            R(1, 0) = s;
            R(1, 1) = c;
            const PolyZonotope* parts[2] = {&c, &s};
            const double x[2] = {jt.offset[0], -jt.offset[1]};
            const double y[2] = {jt.offset[1], jt.offset[0]};
            const PolyZonotope step[2] = {pz::linear_combination(parts, x), pz::linear_combination(parts, y)};
            p = reduce(p + pz::stack(step), options.budget, registry);
            out.push_back({std::move(R), p});
        }
        return out;
    }
    MatPolyZonotope R = MatPolyZonotope::identity(spec.n_d);
    PolyZonotope p(Eigen::VectorXd::Zero(spec.n_d));
    for (int j = 0; j < spec.n_q(); ++j) {
        const MatPolyZonotope rj = pz_joint_rotation(spec, j, q[static_cast<std::size_t>(j)], registry, options);
        R = j == 0 ? rj : reduce(multiply(R, rj), options.budget, registry);
        const PolyZonotope offset(spec.joints[static_cast<std::size_t>(j)].offset);
        p = reduce(p + multiply(R, offset), options.budget, registry);
        out.push_back({R, p});
    }
    return out;
}

std::vector<PolyZonotope> pz_fo(const RobotSpec& spec, const std::vector<PzFrame>& frames, IdRegistry& registry,
                                const PzOptions& options) {
    std::vector<PolyZonotope> out;
    out.reserve(frames.size());
    for (std::size_t j = 0; j < frames.size(); ++j) {
        const PolyZonotope link = PolyZonotope::from_zonotope(spec.joints[j].link, registry);
        out.push_back(reduce(frames[j].p + multiply(frames[j].R, link), options.budget, registry));
    }
    return out;
}

std::vector<PolyZonotope> pz_fo(const RobotSpec& spec, std::span<const PolyZonotope> q, IdRegistry& registry,
                                const PzOptions& options) {
    return pz_fo(spec, pz_fk(spec, q, registry, options), registry, options);
}

pz::Zonotope slice_fo(const PolyZonotope& fo, const Eigen::VectorXd& k) {
    const auto subs = param_substitutions(k);
    return to_zonotope(slice(fo, subs));
}

}  // namespace rdf::arm
