#include "rdf/pz/zonotope.hpp"

#include <stdexcept>
#include <vector>

namespace rdf::pz {

Zonotope::Zonotope(Eigen::VectorXd center)
    : center_(std::move(center)), generators_(center_.size(), 0) {}

Zonotope::Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
    if (generators_.cols() == 0) generators_.resize(center_.size(), 0);
    if (generators_.rows() != center_.size())
        throw std::invalid_argument("Zonotope: generator dimension does not match center");
}

Zonotope Zonotope::box(const Eigen::VectorXd& center, const Eigen::VectorXd& half_widths) {
    if (center.size() != half_widths.size())
        throw std::invalid_argument("Zonotope::box: dimension mismatch");
    return {center, half_widths.cwiseAbs().asDiagonal().toDenseMatrix()};
}

Eigen::VectorXd Zonotope::radius() const {
    if (generators_.cols() == 0) return Eigen::VectorXd::Zero(center_.size());
    return generators_.cwiseAbs().rowwise().sum();
}

Zonotope Zonotope::with_generators_of(const Zonotope& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Zonotope: dimension mismatch");
    Eigen::MatrixXd g(dim(), num_generators() + other.num_generators());
    g << generators_, other.generators_;
    return {center_, std::move(g)};
}

Zonotope Zonotope::compacted(double rel_tol) const {
    std::vector<Eigen::VectorXd> kept;
    for (int i = 0; i < num_generators(); ++i) {
        Eigen::VectorXd g = generators_.col(i);
        const double n = g.norm();
        if (n == 0.0) continue;
        bool merged = false;
        for (auto& k : kept) {
            const double kn = k.norm();
            const double dot = k.dot(g);
            if (kn * n - std::abs(dot) <= rel_tol * kn * n) {
                k += (dot >= 0 ? 1.0 : -1.0) * g;
                merged = true;
                break;
            }
        }
        if (!merged) kept.push_back(std::move(g));
    }
    Eigen::MatrixXd out(dim(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
    return {center_, std::move(out)};
}

}  // namespace rdf::pz
