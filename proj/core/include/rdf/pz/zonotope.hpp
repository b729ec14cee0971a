#pragma once

#include <Eigen/Dense>

namespace rdf::pz {

/// Z = { c + G b : |b|_inf <= 1 }, generators stored as the columns of G.
/// A zonotope without generators is a single point.
class Zonotope {
public:
    Zonotope() = default;
    explicit Zonotope(Eigen::VectorXd center);
    Zonotope(Eigen::VectorXd center, Eigen::MatrixXd generators);

    /// Axis-aligned box centered at `center` with the given half-widths.
    static Zonotope box(const Eigen::VectorXd& center, const Eigen::VectorXd& half_widths);

    int dim() const { return static_cast<int>(center_.size()); }
    int num_generators() const { return static_cast<int>(generators_.cols()); }
    const Eigen::VectorXd& center() const { return center_; }
    const Eigen::MatrixXd& generators() const { return generators_; }

    /// Componentwise interval hull, c -/+ sum |g_i|.
    Eigen::VectorXd radius() const;
    Eigen::VectorXd inf() const { return center_ - radius(); }
    Eigen::VectorXd sup() const { return center_ + radius(); }

    /// Same center, generators of both (the buffered zonotope of two sets).
    Zonotope with_generators_of(const Zonotope& other) const;

    Zonotope translated(const Eigen::VectorXd& t) const { return {center_ + t, generators_}; }
    Zonotope transformed(const Eigen::MatrixXd& a) const { return {a * center_, a * generators_}; }

    /// Drops zero generators and merges parallel ones (same set, fewer columns).
    Zonotope compacted(double rel_tol = 1e-12) const;

private:
    Eigen::VectorXd center_;
    Eigen::MatrixXd generators_;
};

}  // namespace rdf::pz
