#pragma once

#include <vector>

#include "rdf/pz/poly_zonotope.hpp"

namespace rdf::pz {

/// Matrix-valued set held entrywise as scalar polynomial zonotopes.
/// Entries draw indeterminates from one registry, so products keep the
/// dependencies between entries (a rotation stays a rotation under slicing).
class MatPolyZonotope {
public:
    MatPolyZonotope() = default;
    MatPolyZonotope(int rows, int cols);

    static MatPolyZonotope constant(const Eigen::MatrixXd& m);
    static MatPolyZonotope identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const PolyZonotope& operator()(int r, int c) const { return entries_[index(r, c)]; }
    PolyZonotope& operator()(int r, int c) { return entries_[index(r, c)]; }

    /// Matrix of entry centers.
    Eigen::MatrixXd center() const;
    Eigen::MatrixXd evaluate(const std::function<double(IndeterminateId)>& assignment) const;

private:
    std::size_t index(int r, int c) const;

    int rows_ = 0;
    int cols_ = 0;
    std::vector<PolyZonotope> entries_;
};

/// Exact product; inner dimensions must agree.
MatPolyZonotope multiply(const MatPolyZonotope& a, const MatPolyZonotope& b);
/// Exact product with a vector-valued PZ of dimension a.cols().
PolyZonotope multiply(const MatPolyZonotope& a, const PolyZonotope& v);
inline MatPolyZonotope operator*(const MatPolyZonotope& a, const MatPolyZonotope& b) { return multiply(a, b); }
inline PolyZonotope operator*(const MatPolyZonotope& a, const PolyZonotope& v) { return multiply(a, v); }

MatPolyZonotope slice(const MatPolyZonotope& m, std::span<const Substitution> subs);
/// Entrywise reduce.
MatPolyZonotope reduce(const MatPolyZonotope& m, std::size_t budget, IdRegistry& registry);

}  // namespace rdf::pz
