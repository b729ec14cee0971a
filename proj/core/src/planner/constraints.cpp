#include "rdf/planner/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "../net/tape.hpp"

namespace rdf::planner {

using pz::IdRegistry;

JointLimitConstraints::JointLimitConstraints(const arm::RobotSpec& spec, const std::vector<arm::TrajPz>& cells,
                                             double eps)
    : n_q_(spec.n_q()),
      eps_(eps),
      q_min_(spec.q_min()),
      q_max_(spec.q_max()),
      qd_min_(spec.qd_min()),
      qd_max_(spec.qd_max()) {
    if (!(eps > 0)) throw std::invalid_argument("JointLimitConstraints: eps must be positive");
    for (const arm::TrajPz& cell : cells) {
        if (static_cast<int>(cell.q.size()) != n_q_ || static_cast<int>(cell.qd.size()) != n_q_)
            throw std::invalid_argument("JointLimitConstraints: trajectory PZ count differs from n_q");
        for (int j = 0; j < n_q_; ++j) {
            bounds_.push_back(compile(cell.q[static_cast<std::size_t>(j)]));
            bounds_.push_back(compile(cell.qd[static_cast<std::size_t>(j)]));
        }
    }
}

JointLimitConstraints::JointLimitConstraints(const arm::ReachSet& reach, double eps)
    : JointLimitConstraints(reach.spec(),
                            [&] {
                                std::vector<arm::TrajPz> cells;
                                for (int i = 0; i < reach.num_cells(); ++i) cells.push_back(reach.traj(i));
                                return cells;
                            }(),
                            eps) {}

JointLimitConstraints::SlicedBound JointLimitConstraints::compile(const pz::PolyZonotope& p) const {
    if (p.dim() != 1) throw std::invalid_argument("JointLimitConstraints: expected scalar PZs");
    SlicedBound b;
    b.center.push_back({p.center()[0], std::vector<std::uint8_t>(static_cast<std::size_t>(n_q_), 0)});
    const auto& ids = p.ids();
    std::map<std::vector<std::uint8_t>, std::size_t> group_of;  // residual exponent -> group
    for (std::size_t t = 0; t < p.num_terms(); ++t) {
        const auto e = p.exponent(t);
        Term term{p.generator(t)[0], std::vector<std::uint8_t>(static_cast<std::size_t>(n_q_), 0)};
        std::vector<std::uint8_t> residual(ids.size(), 0);
        bool any_residual = false;
        for (std::size_t c = 0; c < ids.size(); ++c) {
            const auto id = ids[c];
            if (id >= IdRegistry::param(0) && id < IdRegistry::param(n_q_)) {
                term.k_exp[static_cast<std::size_t>(id - IdRegistry::param(0))] = e[c];
            } else if (e[c] != 0) {
                residual[c] = e[c];
                any_residual = true;
            }
        }
        if (!any_residual) {
            b.center.push_back(std::move(term));
            continue;
        }
        auto [it, inserted] = group_of.emplace(std::move(residual), b.groups.size());
        if (inserted) b.groups.emplace_back();
        b.groups[it->second].push_back(std::move(term));
    }
    return b;
}

namespace {

// Value of coef * prod k_j^e_j and its gradient added to *grad (scaled by w).
double monomial(const std::vector<std::uint8_t>& e, double coef, const Eigen::VectorXd& k, Eigen::VectorXd* grad,
                double w) {
    double v = coef;
    for (std::size_t j = 0; j < e.size(); ++j)
        if (e[j]) v *= std::pow(k[static_cast<Eigen::Index>(j)], e[j]);
    if (grad) {
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (!e[j]) continue;
            double d = coef * e[j] * std::pow(k[static_cast<Eigen::Index>(j)], e[j] - 1);
            for (std::size_t i = 0; i < e.size(); ++i)
                if (i != j && e[i]) d *= std::pow(k[static_cast<Eigen::Index>(i)], e[i]);
            (*grad)[static_cast<Eigen::Index>(j)] += w * d;
        }
    }
    return v;
}

}  // namespace

std::pair<double, double> JointLimitConstraints::eval(const SlicedBound& b, const Eigen::VectorXd& k,
                                                      Eigen::VectorXd* dc, Eigen::VectorXd* dr) const {
    double c = 0.0;
    for (const Term& t : b.center) c += monomial(t.k_exp, t.coef, k, dc, 1.0);
    double r = 0.0;
    Eigen::VectorXd dg(n_q_);
    for (const auto& group : b.groups) {
        double g = 0.0;
        if (dr) dg.setZero();
        for (const Term& t : group) g += monomial(t.k_exp, t.coef, k, dr ? &dg : nullptr, 1.0);
        const double a = std::sqrt(g * g + eps_ * eps_);
        r += a;
        if (dr) *dr += (g / a) * dg;
    }
    return {c, r};
}

Margins JointLimitConstraints::evaluate(const Eigen::VectorXd& k, bool with_grad) const {
    if (k.size() != n_q_) throw std::invalid_argument("JointLimitConstraints: k has the wrong size");
    Margins m;
    const auto n = static_cast<Eigen::Index>(bounds_.size());
    m.value.resize(n);
    if (with_grad) m.grad.setZero(n, n_q_);
    Eigen::VectorXd dc(n_q_), dr(n_q_);
    for (Eigen::Index row = 0; row < n; ++row) {
        const int j = static_cast<int>((row / 2) % n_q_);
        const bool vel = row % 2 == 1;
        const double lo = vel ? qd_min_[j] : q_min_[j];
        const double hi = vel ? qd_max_[j] : q_max_[j];
        dc.setZero();
        dr.setZero();
        const auto [c, r] = eval(bounds_[static_cast<std::size_t>(row)], k, with_grad ? &dc : nullptr,
                                 with_grad ? &dr : nullptr);
        const double upper = hi - (c + r);
        const double lower = (c - r) - lo;
        if (upper <= lower) {
            m.value[row] = upper;
            if (with_grad) m.grad.row(row) = -(dc + dr).transpose();
        } else {
            m.value[row] = lower;
            if (with_grad) m.grad.row(row) = (dc - dr).transpose();
        }
    }
    return m;
}

Margins neural_margins(const net::MlpModel& model, const Eigen::VectorXd& q0, const Eigen::VectorXd& qd0,
                       const Eigen::VectorXd& k, const std::vector<exact::Obstacle>& obstacles, double delta,
                       bool with_grad) {
    const int n_q = model.n_q();
    if (q0.size() != n_q || qd0.size() != n_q || k.size() != n_q)
        throw std::invalid_argument("neural_margins: state size differs from the model");
    Margins m;
    const auto B = static_cast<Eigen::Index>(obstacles.size());
    m.value.resize(B);
    if (with_grad) m.grad.setZero(B, n_q);
    if (B == 0) return m;
    Eigen::MatrixXd X(model.input_dim(), B);
    for (Eigen::Index l = 0; l < B; ++l) {
        const auto& c = obstacles[static_cast<std::size_t>(l)].center;
        if (c.size() != model.n_d()) throw std::invalid_argument("neural_margins: obstacle dimension mismatch");
        X.col(l) << q0, qd0, k, c;
    }
    net::detail::Tape tape;
    Eigen::MatrixXd seeds;
    const int m_tan = with_grad ? n_q : 0;
    if (with_grad) {
        seeds.setZero(model.input_dim(), B * n_q);
        for (int e = 0; e < n_q; ++e)
            seeds.block(2 * n_q + e, e * B, 1, B).setConstant(model.input_scale()[2 * n_q + e]);
    }
    net::detail::forward(model, net::detail::normalize(model, X), seeds, m_tan, tape);
    for (Eigen::Index l = 0; l < B; ++l) {
        Eigen::Index j = 0;
        m.value[l] = tape.y.col(l).minCoeff(&j) - delta;
        if (with_grad)
            for (int e = 0; e < n_q; ++e) m.grad(l, e) = tape.dy(j, e * B + l);
    }
    return m;
}

ExactCollisionConstraints::ExactCollisionConstraints(const arm::ReachSet& reach, std::vector<exact::Obstacle> obstacles,
                                                     double delta, double fd_step)
    : reach_(reach), obstacles_(std::move(obstacles)), delta_(delta), step_(fd_step) {
    if (!reach.has_occupancy()) throw std::invalid_argument("ExactCollisionConstraints: reach set lacks occupancy");
    if (!(fd_step > 0 && fd_step < 1)) throw std::invalid_argument("ExactCollisionConstraints: bad step");
}

Eigen::VectorXd ExactCollisionConstraints::values(const Eigen::VectorXd& k) const {
    Eigen::VectorXd v(size());
    if (obstacles_.empty()) return v;
    // Hulls depend only on the obstacle side, so share them between equal sides.
    std::vector<std::pair<double, std::vector<exact::ConvexPolytope>>> cache;
    for (std::size_t l = 0; l < obstacles_.size(); ++l) {
        const double side = obstacles_[l].side;
        auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& e) { return e.first == side; });
        if (it == cache.end()) {
            cache.emplace_back(side, exact::buffered_hulls(reach_, k, side));
            it = std::prev(cache.end());
        }
        v[static_cast<Eigen::Index>(l)] = exact::rdf_from_hulls(it->second, obstacles_[l].center).min() - delta_;
    }
    return v;
}

Margins ExactCollisionConstraints::evaluate(const Eigen::VectorXd& k, bool with_grad) const {
    Margins m;
    m.value = values(k);
    if (!with_grad) return m;
    const auto n = k.size();
    m.grad.setZero(size(), n);
    if (obstacles_.empty()) return m;
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd hi = k, lo = k;
        hi[j] = std::min(1.0, k[j] + step_);
        lo[j] = std::max(-1.0, k[j] - step_);
        const Eigen::VectorXd vh = hi[j] == k[j] ? m.value : values(hi);
        const Eigen::VectorXd vl = lo[j] == k[j] ? m.value : values(lo);
        m.grad.col(j) = (vh - vl) / (hi[j] - lo[j]);
    }
    return m;
}

}  // namespace rdf::planner
