#include "rdf/arm/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rdf::arm {

using pz::IdRegistry;
using pz::PolyZonotope;

TrajectoryParams TrajectoryParams::from_spec(const RobotSpec& spec, Eigen::VectorXd q0, Eigen::VectorXd qd0,
                                             Eigen::VectorXd k) {
    TrajectoryParams tp;
    tp.q0 = std::move(q0);
    tp.qd0 = std::move(qd0);
    tp.k = std::move(k);
    tp.accel_scale = spec.timing.accel_scale;
    tp.t_p = spec.timing.t_p;
    tp.t_f = spec.timing.t_f;
    tp.validate();
    return tp;
}

void TrajectoryParams::validate() const {
    const auto n = q0.size();
    if (qd0.size() != n || k.size() != n || accel_scale.size() != n)
        throw std::invalid_argument("TrajectoryParams: vector sizes differ");
    if (!(0.0 < t_p && t_p < t_f)) throw std::invalid_argument("TrajectoryParams: need 0 < t_p < t_f");
    if ((k.array().abs() > 1.0).any()) throw std::invalid_argument("TrajectoryParams: |k_j| > 1");
}

JointState desired_traj_eval(const TrajectoryParams& tp, double t) {
    if (!(0.0 <= t && t <= tp.t_f)) throw std::domain_error("desired_traj_eval: t outside [0, t_f]");
    const Eigen::VectorXd accel = tp.accel_scale.cwiseProduct(tp.k);
    if (t < tp.t_p) {
        return {tp.q0 + tp.qd0 * t + 0.5 * accel * t * t, tp.qd0 + accel * t};
    }
    const Eigen::VectorXd q_p = tp.q0 + tp.qd0 * tp.t_p + 0.5 * accel * tp.t_p * tp.t_p;
    const Eigen::VectorXd v_p = tp.qd0 + accel * tp.t_p;
    const double brake = tp.t_f - tp.t_p;
    const double s = t - tp.t_p;
    return {q_p + v_p * (s - s * s / (2.0 * brake)), v_p * ((tp.t_f - t) / brake)};
}

TimeGrid::TimeGrid(double t_f_, int n_t_) : t_f(t_f_), n_t(n_t_) {
    if (!(t_f > 0) || n_t < 1) throw std::invalid_argument("TimeGrid: need t_f > 0 and n_t >= 1");
}

int TimeGrid::cell_of(double t) const {
    if (!(0.0 <= t && t <= t_f)) throw std::domain_error("TimeGrid: t outside [0, t_f]");
    const int i = static_cast<int>(std::floor(t / dt()));
    return std::min(i, n_t - 1);
}

std::vector<PolyZonotope> make_time_pzs(const TimeGrid& grid) {
    std::vector<PolyZonotope> out;
    out.reserve(static_cast<std::size_t>(grid.n_t));
    const double dt = grid.dt();
    for (int i = 0; i < grid.n_t; ++i)
        out.push_back(PolyZonotope::monomial(IdRegistry::time(i), (i + 0.5) * dt, 0.5 * dt));
    return out;
}

std::vector<pz::Substitution> param_substitutions(const Eigen::VectorXd& k) {
    std::vector<pz::Substitution> subs;
    subs.reserve(static_cast<std::size_t>(k.size()));
    for (Eigen::Index j = 0; j < k.size(); ++j) subs.push_back({IdRegistry::param(static_cast<int>(j)), k[j]});
    return subs;
}

namespace {

// Both branches as PZs over the same time cell T; K = x_{k_j}.
struct Branch {
    PolyZonotope q;
    PolyZonotope qd;
};

Branch ramp(double q0, double qd0, double eta, const PolyZonotope& t, const PolyZonotope& k) {
    const PolyZonotope ek = eta * k;
    const PolyZonotope ekt = multiply(ek, t);
    return {PolyZonotope::constant(q0) + qd0 * t + 0.5 * multiply(ekt, t), ekt + qd0};
}

Branch braking(double q0, double qd0, double eta, double t_p, double t_f, const PolyZonotope& t,
               const PolyZonotope& k) {
    const PolyZonotope ek = eta * k;
    const PolyZonotope q_p = (t_p * t_p * 0.5) * ek + (q0 + qd0 * t_p);
    const PolyZonotope v_p = t_p * ek + qd0;
    const PolyZonotope s = t + (-t_p);
    const double brake = t_f - t_p;
    const PolyZonotope shape = s + (-1.0 / (2.0 * brake)) * multiply(s, s);
    const PolyZonotope fall = (-1.0 / brake) * t + t_f / brake;
    return {q_p + multiply(v_p, shape), multiply(v_p, fall)};
}

// Encloses "either a or b" by (a+b)/2 + (a-b)/2 y with y fresh.
PolyZonotope either(const PolyZonotope& a, const PolyZonotope& b, pz::IndeterminateId y) {
    return 0.5 * (a + b) + multiply(0.5 * (a - b), PolyZonotope::monomial(y, 0.0, 1.0));
}

}  // namespace

TrajPz traj_pz(const RobotSpec& spec, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0, const TimeGrid& grid,
               int cell, IdRegistry& registry) {
    if (cell < 0 || cell >= grid.n_t) throw std::out_of_range("traj_pz: time cell " + std::to_string(cell));
    if (q0.size() != spec.n_q() || qd0.size() != spec.n_q()) throw std::invalid_argument("traj_pz: state size");
    const double dt = grid.dt();
    const PolyZonotope t = PolyZonotope::monomial(IdRegistry::time(cell), (cell + 0.5) * dt, 0.5 * dt);
    const double lo = cell * dt;
    const double hi = (cell + 1) * dt;
    const double t_p = spec.timing.t_p;
    const double t_f = spec.timing.t_f;
    // Relative slack so a t_p sitting on a grid line counts as a clean split.
    const double eps = 1e-12 * t_f;

    TrajPz out;
    for (int j = 0; j < spec.n_q(); ++j) {
        const PolyZonotope k = PolyZonotope::monomial(IdRegistry::param(j), 0.0, 1.0);
        const double eta = spec.timing.accel_scale[j];
        Branch b;
        if (hi <= t_p + eps) {
            b = ramp(q0[j], qd0[j], eta, t, k);
        } else if (lo >= t_p - eps) {
            b = braking(q0[j], qd0[j], eta, t_p, t_f, t, k);
        } else {
            const Branch r = ramp(q0[j], qd0[j], eta, t, k);
            const Branch br = braking(q0[j], qd0[j], eta, t_p, t_f, t, k);
            const pz::IndeterminateId y = registry.fresh();
            b = {either(r.q, br.q, y), either(r.qd, br.qd, y)};
        }
        out.q.push_back(std::move(b.q));
        out.qd.push_back(std::move(b.qd));
    }
    return out;
}

}  // namespace rdf::arm
