#include "rdf/pz/mat_poly_zonotope.hpp"

#include <stdexcept>

namespace rdf::pz {

MatPolyZonotope::MatPolyZonotope(int rows, int cols)
    : rows_(rows), cols_(cols),
      entries_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), PolyZonotope::constant(0.0)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("MatPolyZonotope: negative shape");
}

std::size_t MatPolyZonotope::index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("MatPolyZonotope: index out of range");
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
}

MatPolyZonotope MatPolyZonotope::constant(const Eigen::MatrixXd& m) {
    MatPolyZonotope out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int r = 0; r < out.rows_; ++r)
        for (int c = 0; c < out.cols_; ++c) out(r, c) = PolyZonotope::constant(m(r, c));
    return out;
}

MatPolyZonotope MatPolyZonotope::identity(int n) { return constant(Eigen::MatrixXd::Identity(n, n)); }

Eigen::MatrixXd MatPolyZonotope::center() const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).center()[0];
    return m;
}

Eigen::MatrixXd MatPolyZonotope::evaluate(const std::function<double(IndeterminateId)>& assignment) const {
    Eigen::MatrixXd m(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c).evaluate_scalar(assignment);
    return m;
}

MatPolyZonotope multiply(const MatPolyZonotope& a, const MatPolyZonotope& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("MatPolyZonotope product: inner dimensions differ");
    MatPolyZonotope out(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) {
            PolyZonotope acc = PolyZonotope::constant(0.0);
            for (int k = 0; k < a.cols(); ++k) {
                const PolyZonotope& x = a(r, k);
                const PolyZonotope& y = b(k, c);
                if (x.is_point() && x.center()[0] == 0.0) continue;
                if (y.is_point() && y.center()[0] == 0.0) continue;
                acc = acc + multiply(x, y);
            }
            out(r, c) = std::move(acc);
        }
    return out;
}

PolyZonotope multiply(const MatPolyZonotope& a, const PolyZonotope& v) {
    if (a.cols() != v.dim()) throw std::invalid_argument("MatPolyZonotope x vector: dimension mismatch");
    std::vector<PolyZonotope> comps;
    comps.reserve(static_cast<std::size_t>(v.dim()));
    for (int k = 0; k < v.dim(); ++k) comps.push_back(component(v, k));
    std::vector<PolyZonotope> rows;
    rows.reserve(static_cast<std::size_t>(a.rows()));
    for (int r = 0; r < a.rows(); ++r) {
        PolyZonotope acc = PolyZonotope::constant(0.0);
        for (int k = 0; k < a.cols(); ++k) {
            const PolyZonotope& x = a(r, k);
            if (x.is_point() && x.center()[0] == 0.0) continue;
            acc = acc + multiply(x, comps[static_cast<std::size_t>(k)]);
        }
        rows.push_back(std::move(acc));
    }
    return stack(rows);
}

MatPolyZonotope slice(const MatPolyZonotope& m, std::span<const Substitution> subs) {
    MatPolyZonotope out = m;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(r, c) = slice(m(r, c), subs);
    return out;
}

MatPolyZonotope reduce(const MatPolyZonotope& m, std::size_t budget, IdRegistry& registry) {
    MatPolyZonotope out = m;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out(r, c) = reduce(m(r, c), budget, registry);
    return out;
}

}  // namespace rdf::pz
