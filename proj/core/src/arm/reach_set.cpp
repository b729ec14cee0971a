#include "rdf/arm/reach_set.hpp"

#include <stdexcept>

namespace rdf::arm {

ReachSet::ReachSet(const RobotSpec& spec, Eigen::VectorXd q0, Eigen::VectorXd qd0, const PzOptions& options,
                   bool with_occupancy)
    : spec_(spec), grid_(spec.timing.t_f, spec.timing.n_t), q0_(std::move(q0)), qd0_(std::move(qd0)) {
    if (q0_.size() != spec_.n_q() || qd0_.size() != spec_.n_q())
        throw std::invalid_argument("ReachSet: initial state has the wrong size");
    pz::IdRegistry registry;
    traj_.reserve(static_cast<std::size_t>(grid_.n_t));
    for (int i = 0; i < grid_.n_t; ++i) traj_.push_back(traj_pz(spec_, q0_, qd0_, grid_, i, registry));
    if (!with_occupancy) return;
    fo_.reserve(traj_.size());
    for (const TrajPz& t : traj_) fo_.push_back(pz_fo(spec_, t.q, registry, options));
}

const pz::PolyZonotope& ReachSet::fo(int cell, int link) const {
    if (fo_.empty()) throw std::logic_error("ReachSet: built without occupancy");
    return fo_.at(static_cast<std::size_t>(cell)).at(static_cast<std::size_t>(link));
}

std::vector<pz::Zonotope> ReachSet::sliced_fo(int link, const Eigen::VectorXd& k) const {
    std::vector<pz::Zonotope> out;
    out.reserve(static_cast<std::size_t>(grid_.n_t));
    for (int i = 0; i < grid_.n_t; ++i) out.push_back(slice_fo(fo(i, link), k));
    return out;
}

}  // namespace rdf::arm
