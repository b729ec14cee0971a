#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rdf/pz/zonotope.hpp"

namespace rdf::pz {

using IndeterminateId = std::uint64_t;

class PolyZonotope;

/// Hands out indeterminate identifiers for one planning or labeling context.
///
/// Trajectory parameters and time cells use reserved ranges so that they can
/// be addressed by slice(); everything produced by reduce() or the Taylor
/// remainder draws from the fresh range. A registry is not thread-safe; give
/// each worker its own, which also keeps results independent of scheduling.
class IdRegistry {
public:
    static constexpr IndeterminateId kParamBase = 1;
    static constexpr IndeterminateId kTimeBase = IndeterminateId{1} << 20;
    static constexpr IndeterminateId kFreshBase = IndeterminateId{1} << 40;

    static IndeterminateId param(int joint) { return kParamBase + static_cast<IndeterminateId>(joint); }
    static IndeterminateId time(int cell) { return kTimeBase + static_cast<IndeterminateId>(cell); }
    static bool is_fresh(IndeterminateId id) { return id >= kFreshBase; }

    IdRegistry() = default;
    /// Starts the fresh range at `next` (must lie in the fresh range).
    explicit IdRegistry(IndeterminateId next) : next_(next < kFreshBase ? kFreshBase : next) {}
    /// Registry whose fresh ids exceed every id used by `p`.
    static IdRegistry after(const PolyZonotope& p);

    IndeterminateId fresh() { return next_++; }

private:
    IndeterminateId next_ = kFreshBase;
};

struct Bounds {
    Eigen::VectorXd inf;
    Eigen::VectorXd sup;
};

/// One substitution x_id := value for slice().
struct Substitution {
    IndeterminateId id;
    double value;
};

/// Sparse polynomial zonotope { g0 + sum_i g_i x^{a_i} : x in [-1, 1]^m }.
///
/// Terms are kept in canonical form: exponent rows sorted lexicographically
/// over the (ascending) id list, duplicates merged, zero generators dropped,
/// and ids no term references pruned. The all-zero exponent lives in center().
class PolyZonotope {
public:
    PolyZonotope() = default;
    explicit PolyZonotope(Eigen::VectorXd center);

    /// Builds from raw terms; exponents is row-major (num_terms x ids.size()),
    /// generators holds one column per term. Rows are merged as needed.
    PolyZonotope(Eigen::VectorXd center, std::vector<IndeterminateId> ids,
                 std::vector<std::uint8_t> exponents, const Eigen::MatrixXd& generators);

    static PolyZonotope constant(double value);
    /// Scalar c + s * x_id.
    static PolyZonotope monomial(IndeterminateId id, double center, double scale);
    /// Zonotope with one fresh indeterminate per generator.
    static PolyZonotope from_zonotope(const Zonotope& z, IdRegistry& registry);

    int dim() const { return static_cast<int>(center_.size()); }
    std::size_t num_terms() const { return num_terms_; }
    std::size_t num_ids() const { return ids_.size(); }
    bool is_point() const { return num_terms_ == 0; }

    const std::vector<IndeterminateId>& ids() const { return ids_; }
    const Eigen::VectorXd& center() const { return center_; }
    Eigen::Map<const Eigen::MatrixXd> generators() const {
        return {gens_.data(), center_.size(), static_cast<Eigen::Index>(num_terms_)};
    }
    Eigen::Map<const Eigen::VectorXd> generator(std::size_t term) const {
        return {gens_.data() + term * center_.size(), center_.size()};
    }
    std::span<const std::uint8_t> exponent(std::size_t term) const {
        return {exps_.data() + term * ids_.size(), ids_.size()};
    }
    /// Exponent of `id` in `term`, zero when the id is absent.
    int degree(std::size_t term, IndeterminateId id) const;
    bool depends_on(IndeterminateId id) const;

    Eigen::VectorXd evaluate(const std::function<double(IndeterminateId)>& assignment) const;
    double evaluate_scalar(const std::function<double(IndeterminateId)>& assignment) const;

private:
    friend class PzAccess;

    Eigen::VectorXd center_;
    std::vector<IndeterminateId> ids_;
    std::vector<std::uint8_t> exps_;
    std::vector<double> gens_;
    std::size_t num_terms_ = 0;
};

PolyZonotope operator+(const PolyZonotope& a, const PolyZonotope& b);
PolyZonotope operator-(const PolyZonotope& a, const PolyZonotope& b);
PolyZonotope operator-(const PolyZonotope& a);
PolyZonotope operator*(double s, const PolyZonotope& p);
PolyZonotope operator+(const PolyZonotope& p, const Eigen::VectorXd& v);
PolyZonotope operator+(const PolyZonotope& p, double v);
inline PolyZonotope operator+(double v, const PolyZonotope& p) { return p + v; }

/// Exact product. At least one operand must be scalar-valued; the result has
/// the dimension of the other. Shared indeterminates keep their dependency.
PolyZonotope multiply(const PolyZonotope& a, const PolyZonotope& b);
inline PolyZonotope operator*(const PolyZonotope& a, const PolyZonotope& b) { return multiply(a, b); }

PolyZonotope power(const PolyZonotope& p, int n);

/// sum_i coeffs[i] * parts[i], normalized once.
PolyZonotope linear_combination(std::span<const PolyZonotope* const> parts, std::span<const double> coeffs);

/// Exact image under x -> A x.
PolyZonotope linear_map(const Eigen::MatrixXd& a, const PolyZonotope& p);

/// Substitutes values in [-1, 1] for indeterminates; absent ids are ignored.
PolyZonotope slice(const PolyZonotope& p, IndeterminateId id, double value);
PolyZonotope slice(const PolyZonotope& p, std::span<const Substitution> subs);

/// Interval hull g0 -/+ sum |g_i|.
Bounds bounds(const PolyZonotope& p);

/// Keeps the `budget` terms with largest infinity-norm (ties: lower term
/// index) and encloses the rest in an axis-aligned box on fresh indeterminates.
PolyZonotope reduce(const PolyZonotope& p, std::size_t budget, IdRegistry& registry);

enum class TrigFn { sin, cos };

/// Degree-d Taylor enclosure of sin/cos over a scalar PZ, plus a Lagrange
/// remainder interval on a fresh indeterminate. A nonzero `budget` reduces
/// each power of (p - c) to that many terms before it is reused.
PolyZonotope trig(TrigFn fn, const PolyZonotope& p, int degree, IdRegistry& registry, std::size_t budget = 0);

struct SinCos {
    PolyZonotope sin;
    PolyZonotope cos;
};
/// Both enclosures at once, sharing the powers of (p - c).
SinCos sincos(const PolyZonotope& p, int degree, IdRegistry& registry, std::size_t budget = 0);

/// Zonotope enclosure: degree-1 single-indeterminate terms become generators
/// directly; every other monomial is enclosed by the segment of its generator
/// (shifted to [0, g] when all its exponents are even).
Zonotope to_zonotope(const PolyZonotope& p);

/// Partial derivative with respect to one indeterminate.
PolyZonotope differentiate(const PolyZonotope& p, IndeterminateId id);

/// Scalar PZ of one coordinate of a vector PZ.
PolyZonotope component(const PolyZonotope& p, int row);
/// Vector PZ whose coordinates are the given scalar PZs (dependencies kept).
PolyZonotope stack(std::span<const PolyZonotope> scalars);

}  // namespace rdf::pz
