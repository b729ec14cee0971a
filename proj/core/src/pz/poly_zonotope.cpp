#include "rdf/pz/poly_zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rdf/pz/interval.hpp"

namespace rdf::pz {

namespace {

using Exps = std::vector<std::uint8_t>;

std::uint8_t add_degrees(unsigned a, unsigned b) {
    const unsigned s = a + b;
    if (s > 255u) throw std::overflow_error("PolyZonotope: exponent exceeds 255");
    return static_cast<std::uint8_t>(s);
}

// Sorted union of two id lists plus column maps into it.
struct IdUnion {
    std::vector<IndeterminateId> ids;
    std::vector<std::size_t> map_a;
    std::vector<std::size_t> map_b;
};

IdUnion unite(const std::vector<IndeterminateId>& a, const std::vector<IndeterminateId>& b) {
    IdUnion u;
    u.ids.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u.ids));
    auto map = [&](const std::vector<IndeterminateId>& src) {
        std::vector<std::size_t> m(src.size());
        for (std::size_t i = 0; i < src.size(); ++i)
            m[i] = static_cast<std::size_t>(std::lower_bound(u.ids.begin(), u.ids.end(), src[i]) - u.ids.begin());
        return m;
    };
    u.map_a = map(a);
    u.map_b = map(b);
    return u;
}

}  // namespace

// Raw-term construction shared by every operation. Keeps PolyZonotope canonical.
class PzAccess {
public:
    static PolyZonotope build(Eigen::VectorXd center, std::vector<IndeterminateId> ids, const Exps& exps,
                              const std::vector<double>& gens, std::size_t n) {
        const std::size_t m = ids.size();
        const auto d = static_cast<std::size_t>(center.size());

        // Rows sort lexicographically; up to 16 ids pack into one big-endian key.
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::vector<unsigned __int128> keys;
        if (m > 0 && m <= 16) {
            keys.resize(n);
            std::vector<std::pair<unsigned __int128, std::uint32_t>> keyed(n);
            for (std::size_t t = 0; t < n; ++t) {
                unsigned __int128 k = 0;
                for (std::size_t c = 0; c < m; ++c) k = (k << 8) | exps[t * m + c];
                keys[t] = k;
                keyed[t] = {k, static_cast<std::uint32_t>(t)};
            }
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t t = 0; t < n; ++t) order[t] = keyed[t].second;
        } else if (m > 0) {
            std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                const int c = std::memcmp(exps.data() + a * m, exps.data() + b * m, m);
                return c < 0 || (c == 0 && a < b);
            });
        }
        auto same_row = [&](std::uint32_t a, std::uint32_t b) {
            if (m == 0) return true;
            if (!keys.empty()) return keys[a] == keys[b];
            return std::memcmp(exps.data() + a * m, exps.data() + b * m, m) == 0;
        };

        PolyZonotope out;
        out.center_ = std::move(center);
        out.exps_.reserve(n * m);
        out.gens_.reserve(n * d);
        std::vector<double> acc(d);
        const Exps zero_row(m, 0);

        for (std::size_t i = 0; i < n;) {
            const std::uint8_t* row = exps.data() + order[i] * m;
            std::copy_n(gens.data() + order[i] * d, d, acc.begin());
            std::size_t j = i + 1;
            while (j < n && same_row(order[i], order[j])) {
                const double* g = gens.data() + order[j] * d;
                for (std::size_t r = 0; r < d; ++r) acc[r] += g[r];
                ++j;
            }
            if (m == 0 || std::memcmp(row, zero_row.data(), m) == 0) {
                for (std::size_t r = 0; r < d; ++r) out.center_[static_cast<Eigen::Index>(r)] += acc[r];
            } else if (std::any_of(acc.begin(), acc.end(), [](double v) { return v != 0.0; })) {
                out.exps_.insert(out.exps_.end(), row, row + m);
                out.gens_.insert(out.gens_.end(), acc.begin(), acc.end());
                ++out.num_terms_;
            }
            i = j;
        }

        // Prune ids that no surviving term references.
        std::vector<bool> used(m, false);
        for (std::size_t t = 0; t < out.num_terms_; ++t)
            for (std::size_t c = 0; c < m; ++c)
                if (out.exps_[t * m + c] != 0) used[c] = true;
        const auto kept = static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
        if (kept == m) {
            out.ids_ = std::move(ids);
        } else {
            out.ids_.reserve(kept);
            for (std::size_t c = 0; c < m; ++c)
                if (used[c]) out.ids_.push_back(ids[c]);
            Exps compact(out.num_terms_ * kept);
            for (std::size_t t = 0; t < out.num_terms_; ++t) {
                std::size_t k = 0;
                for (std::size_t c = 0; c < m; ++c)
                    if (used[c]) compact[t * kept + k++] = out.exps_[t * m + c];
            }
            out.exps_ = std::move(compact);
        }
        return out;
    }

    /// sum_i coeffs[i] * parts[i] with a single normalization pass.
    static PolyZonotope combine(std::span<const PolyZonotope* const> parts, std::span<const double> coeffs) {
        const int d = parts.front()->dim();
        std::vector<IndeterminateId> ids;
        std::size_t n = 0;
        Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i]->dim() != d) throw std::invalid_argument("PolyZonotope sum: dimension mismatch");
            std::vector<IndeterminateId> merged;
            std::set_union(ids.begin(), ids.end(), parts[i]->ids_.begin(), parts[i]->ids_.end(),
                           std::back_inserter(merged));
            ids = std::move(merged);
            n += parts[i]->num_terms_;
            center += coeffs[i] * parts[i]->center_;
        }
        const std::size_t m = ids.size();
        Exps exps(n * m, 0);
        std::vector<double> gens;
        gens.reserve(n * static_cast<std::size_t>(d));
        std::size_t row = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const PolyZonotope& p = *parts[i];
            std::vector<std::size_t> map(p.ids_.size());
            for (std::size_t c = 0; c < map.size(); ++c)
                map[c] = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), p.ids_[c]) - ids.begin());
            for (std::size_t t = 0; t < p.num_terms_; ++t, ++row)
                for (std::size_t c = 0; c < map.size(); ++c) exps[row * m + map[c]] = p.exps_[t * map.size() + c];
            for (double g : p.gens_) gens.push_back(coeffs[i] * g);
        }
        return build(std::move(center), std::move(ids), exps, gens, n);
    }

    static const Exps& exps(const PolyZonotope& p) { return p.exps_; }
    static const std::vector<double>& gens(const PolyZonotope& p) { return p.gens_; }
};

IdRegistry IdRegistry::after(const PolyZonotope& p) {
    return IdRegistry(p.ids().empty() ? kFreshBase : p.ids().back() + 1);
}

PolyZonotope::PolyZonotope(Eigen::VectorXd center) : center_(std::move(center)) {}

PolyZonotope::PolyZonotope(Eigen::VectorXd center, std::vector<IndeterminateId> ids,
                           std::vector<std::uint8_t> exponents, const Eigen::MatrixXd& generators) {
    const auto n = static_cast<std::size_t>(generators.cols());
    if (generators.rows() != center.size() && n > 0)
        throw std::invalid_argument("PolyZonotope: generator dimension does not match center");
    if (exponents.size() != n * ids.size())
        throw std::invalid_argument("PolyZonotope: exponent table has the wrong size");
    if (!std::is_sorted(ids.begin(), ids.end()) || std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("PolyZonotope: ids must be strictly increasing");
    std::vector<double> gens(generators.data(), generators.data() + generators.size());
    *this = PzAccess::build(std::move(center), std::move(ids), exponents, gens, n);
}

PolyZonotope PolyZonotope::constant(double value) { return PolyZonotope(Eigen::VectorXd::Constant(1, value)); }

PolyZonotope PolyZonotope::monomial(IndeterminateId id, double center, double scale) {
    return PzAccess::build(Eigen::VectorXd::Constant(1, center), {id}, {1}, {scale}, 1);
}

PolyZonotope PolyZonotope::from_zonotope(const Zonotope& z, IdRegistry& registry) {
    const auto n = static_cast<std::size_t>(z.num_generators());
    std::vector<IndeterminateId> ids(n);
    for (auto& id : ids) id = registry.fresh();
    Exps exps(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) exps[i * n + i] = 1;
    std::vector<double> gens(z.generators().data(), z.generators().data() + z.generators().size());
    return PzAccess::build(z.center(), std::move(ids), exps, gens, n);
}

int PolyZonotope::degree(std::size_t term, IndeterminateId id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return 0;
    return exps_[term * ids_.size() + static_cast<std::size_t>(it - ids_.begin())];
}

bool PolyZonotope::depends_on(IndeterminateId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

Eigen::VectorXd PolyZonotope::evaluate(const std::function<double(IndeterminateId)>& assignment) const {
    std::vector<double> x(ids_.size());
    for (std::size_t c = 0; c < ids_.size(); ++c) x[c] = assignment(ids_[c]);
    Eigen::VectorXd out = center_;
    const std::size_t m = ids_.size();
    for (std::size_t t = 0; t < num_terms_; ++t) {
        double f = 1.0;
        for (std::size_t c = 0; c < m; ++c) {
            const int e = exps_[t * m + c];
            if (e != 0) f *= std::pow(x[c], e);
        }
        out += f * generator(t);
    }
    return out;
}

double PolyZonotope::evaluate_scalar(const std::function<double(IndeterminateId)>& assignment) const {
    if (dim() != 1) throw std::invalid_argument("evaluate_scalar: PolyZonotope is not scalar");
    return evaluate(assignment)[0];
}

PolyZonotope operator+(const PolyZonotope& a, const PolyZonotope& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("PolyZonotope sum: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()) + ")");
    const IdUnion u = unite(a.ids(), b.ids());
    const std::size_t m = u.ids.size();
    const std::size_t na = a.num_terms(), nb = b.num_terms();
    Exps exps((na + nb) * m, 0);
    for (std::size_t t = 0; t < na; ++t) {
        const auto e = a.exponent(t);
        for (std::size_t c = 0; c < e.size(); ++c) exps[t * m + u.map_a[c]] = e[c];
    }
    for (std::size_t t = 0; t < nb; ++t) {
        const auto e = b.exponent(t);
        for (std::size_t c = 0; c < e.size(); ++c) exps[(na + t) * m + u.map_b[c]] = e[c];
    }
    std::vector<double> gens = PzAccess::gens(a);
    const auto& gb = PzAccess::gens(b);
    gens.insert(gens.end(), gb.begin(), gb.end());
    return PzAccess::build(a.center() + b.center(), u.ids, exps, gens, na + nb);
}

PolyZonotope operator*(double s, const PolyZonotope& p) {
    std::vector<double> gens = PzAccess::gens(p);
    for (double& g : gens) g *= s;
    return PzAccess::build(s * p.center(), p.ids(), PzAccess::exps(p), gens, p.num_terms());
}

PolyZonotope operator-(const PolyZonotope& a) { return -1.0 * a; }
PolyZonotope operator-(const PolyZonotope& a, const PolyZonotope& b) { return a + (-b); }

PolyZonotope operator+(const PolyZonotope& p, const Eigen::VectorXd& v) {
    if (v.size() != p.dim()) throw std::invalid_argument("PolyZonotope + vector: dimension mismatch");
    return PzAccess::build(p.center() + v, p.ids(), PzAccess::exps(p), PzAccess::gens(p), p.num_terms());
}

PolyZonotope operator+(const PolyZonotope& p, double v) { return p + Eigen::VectorXd::Constant(1, v); }

PolyZonotope multiply(const PolyZonotope& a, const PolyZonotope& b) {
    const bool a_scalar = a.dim() == 1;
    if (!a_scalar && b.dim() != 1)
        throw std::invalid_argument("PolyZonotope product: one operand must be scalar-valued");
    const PolyZonotope& s = a_scalar ? a : b;
    const PolyZonotope& v = a_scalar ? b : a;
    const auto d = static_cast<std::size_t>(v.dim());

    const IdUnion u = unite(s.ids(), v.ids());
    const std::size_t m = u.ids.size();
    const std::size_t ns = s.num_terms() + 1, nv = v.num_terms() + 1;
    const std::size_t n = ns * nv;
    Exps exps(n * m, 0);
    std::vector<double> gens(n * d);

    // Row 0 of each operand is its center (zero exponent).
    std::vector<std::uint8_t> es(m), ev(m);
    for (std::size_t i = 0; i < ns; ++i) {
        std::fill(es.begin(), es.end(), 0);
        double gs = s.center()[0];
        if (i > 0) {
            const auto e = s.exponent(i - 1);
            for (std::size_t c = 0; c < e.size(); ++c) es[u.map_a[c]] = e[c];
            gs = s.generator(i - 1)[0];
        }
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t row = i * nv + j;
            std::uint8_t* out = exps.data() + row * m;
            if (j > 0) {
                std::fill(ev.begin(), ev.end(), 0);
                const auto e = v.exponent(j - 1);
                for (std::size_t c = 0; c < e.size(); ++c) ev[u.map_b[c]] = e[c];
                for (std::size_t c = 0; c < m; ++c) out[c] = add_degrees(es[c], ev[c]);
                const auto g = v.generator(j - 1);
                for (std::size_t r = 0; r < d; ++r) gens[row * d + r] = gs * g[static_cast<Eigen::Index>(r)];
            } else {
                std::copy(es.begin(), es.end(), out);
                for (std::size_t r = 0; r < d; ++r) gens[row * d + r] = gs * v.center()[static_cast<Eigen::Index>(r)];
            }
        }
    }
    return PzAccess::build(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), u.ids, exps, gens, n);
}

PolyZonotope power(const PolyZonotope& p, int n) {
    if (p.dim() != 1) throw std::invalid_argument("power: PolyZonotope is not scalar");
    if (n < 0) throw std::invalid_argument("power: negative exponent");
    PolyZonotope out = PolyZonotope::constant(1.0);
    for (int i = 0; i < n; ++i) out = multiply(out, p);
    return out;
}

PolyZonotope linear_combination(std::span<const PolyZonotope* const> parts, std::span<const double> coeffs) {
    if (parts.empty() || parts.size() != coeffs.size())
        throw std::invalid_argument("linear_combination: need matching, nonempty inputs");
    return PzAccess::combine(parts, coeffs);
}

PolyZonotope linear_map(const Eigen::MatrixXd& a, const PolyZonotope& p) {
    if (a.cols() != p.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
    const Eigen::MatrixXd g = a * p.generators();
    std::vector<double> gens(g.data(), g.data() + g.size());
    return PzAccess::build(a * p.center(), p.ids(), PzAccess::exps(p), gens, p.num_terms());
}

PolyZonotope slice(const PolyZonotope& p, IndeterminateId id, double value) {
    const Substitution s{id, value};
    return slice(p, std::span<const Substitution>(&s, 1));
}

PolyZonotope slice(const PolyZonotope& p, std::span<const Substitution> subs) {
    const auto& ids = p.ids();
    const std::size_t m = ids.size();
    std::vector<std::pair<std::size_t, double>> cols;
    for (const auto& s : subs) {
        if (!(std::abs(s.value) <= 1.0)) throw std::domain_error("slice: value outside [-1, 1]");
        const auto it = std::lower_bound(ids.begin(), ids.end(), s.id);
        if (it != ids.end() && *it == s.id) cols.emplace_back(static_cast<std::size_t>(it - ids.begin()), s.value);
    }
    if (cols.empty()) return p;

    const auto d = static_cast<std::size_t>(p.dim());
    Exps exps = PzAccess::exps(p);
    std::vector<double> gens = PzAccess::gens(p);
    for (std::size_t t = 0; t < p.num_terms(); ++t) {
        double f = 1.0;
        for (const auto& [c, v] : cols) {
            std::uint8_t& e = exps[t * m + c];
            for (int k = 0; k < e; ++k) f *= v;
            e = 0;
        }
        if (f != 1.0)
            for (std::size_t r = 0; r < d; ++r) gens[t * d + r] *= f;
    }
    return PzAccess::build(p.center(), ids, exps, gens, p.num_terms());
}

Bounds bounds(const PolyZonotope& p) {
    Eigen::VectorXd rad = Eigen::VectorXd::Zero(p.dim());
    if (!p.is_point()) rad = p.generators().cwiseAbs().rowwise().sum();
    return {p.center() - rad, p.center() + rad};
}

PolyZonotope reduce(const PolyZonotope& p, std::size_t budget, IdRegistry& registry) {
    if (budget < 1) throw std::invalid_argument("reduce: budget must be at least 1");
    const std::size_t n = p.num_terms();
    if (n <= budget) return p;

    const auto d = static_cast<std::size_t>(p.dim());
    std::vector<double> norm(n);
    for (std::size_t t = 0; t < n; ++t) norm[t] = p.generator(t).lpNorm<Eigen::Infinity>();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return norm[a] > norm[b]; });

    std::vector<bool> keep(n, false);
    for (std::size_t i = 0; i < budget; ++i) keep[order[i]] = true;

    Eigen::VectorXd box = Eigen::VectorXd::Zero(p.dim());
    for (std::size_t t = 0; t < n; ++t)
        if (!keep[t]) box += p.generator(t).cwiseAbs();

    std::vector<IndeterminateId> ids = p.ids();
    const std::size_t m_old = ids.size();
    std::vector<IndeterminateId> fresh;
    for (std::size_t r = 0; r < d; ++r)
        if (box[static_cast<Eigen::Index>(r)] > 0) fresh.push_back(registry.fresh());
    ids.insert(ids.end(), fresh.begin(), fresh.end());  // fresh ids exceed every existing id
    if (!std::is_sorted(ids.begin(), ids.end()))
        throw std::logic_error("reduce: fresh indeterminate collides with an existing id");
    const std::size_t m = ids.size();

    Exps exps;
    std::vector<double> gens;
    std::size_t rows = 0;
    const auto& src = PzAccess::exps(p);
    const auto& src_g = PzAccess::gens(p);
    for (std::size_t t = 0; t < n; ++t) {
        if (!keep[t]) continue;
        exps.insert(exps.end(), src.begin() + static_cast<std::ptrdiff_t>(t * m_old),
                    src.begin() + static_cast<std::ptrdiff_t>((t + 1) * m_old));
        exps.resize(exps.size() + fresh.size(), 0);
        gens.insert(gens.end(), src_g.begin() + static_cast<std::ptrdiff_t>(t * d),
                    src_g.begin() + static_cast<std::ptrdiff_t>((t + 1) * d));
        ++rows;
    }
    std::size_t f = 0;
    for (std::size_t r = 0; r < d; ++r) {
        if (!(box[static_cast<Eigen::Index>(r)] > 0)) continue;
        const std::size_t base = exps.size();
        exps.resize(base + m, 0);
        exps[base + m_old + f] = 1;
        const std::size_t gbase = gens.size();
        gens.resize(gbase + d, 0.0);
        gens[gbase + r] = box[static_cast<Eigen::Index>(r)];
        ++rows;
        ++f;
    }
    return PzAccess::build(p.center(), std::move(ids), exps, gens, rows);
}

namespace {

// n-th derivative of sin (or cos) at x: sin, cos, -sin, -cos for n mod 4.
double trig_derivative(TrigFn fn, int n, double x) {
    switch ((fn == TrigFn::sin ? n : n + 1) % 4) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}

// Taylor polynomial about the center plus a Lagrange remainder,
// f^(d+1)([P]) * [-r, r]^(d+1) / (d+1)! with r = sup |P - c|, on a fresh indeterminate.
PolyZonotope taylor(TrigFn fn, const PolyZonotope& p, const std::vector<PolyZonotope>& powers, int degree,
                    IdRegistry& registry) {
    const double c = p.center()[0];
    if (p.is_point()) return PolyZonotope::constant(trig_derivative(fn, 0, c));
    std::vector<const PolyZonotope*> parts;
    std::vector<double> coeffs;
    double factorial = 1.0;
    for (int n = 0; n <= degree; ++n) {
        if (n > 0) factorial *= n;
        parts.push_back(&powers[static_cast<std::size_t>(n)]);
        coeffs.push_back(trig_derivative(fn, n, c) / factorial);
    }
    factorial *= degree + 1;
    PolyZonotope out = PzAccess::combine(parts, coeffs);

    const Bounds range = bounds(p);
    const Interval whole(range.inf[0], range.sup[0]);
    const Interval m = fn == TrigFn::sin ? sin_derivative(degree + 1, whole) : cos_derivative(degree + 1, whole);
    const double r = range.sup[0] - c;
    const double rp = std::pow(r, degree + 1);
    const Interval dev_pow = (degree + 1) % 2 == 0 ? Interval(0.0, rp) : Interval(-rp, rp);
    const Interval rem = (1.0 / factorial) * (m * dev_pow);
    // Round the enclosure outward so the remainder box stays sound.
    const double half = std::nextafter(rem.radius() * (1.0 + 1e-12), std::numeric_limits<double>::infinity());
    out = out + rem.mid();
    if (half > 0) out = out + PolyZonotope::monomial(registry.fresh(), 0.0, half);
    return out;
}

std::vector<PolyZonotope> deviation_powers(const PolyZonotope& p, int degree, std::size_t budget,
                                           IdRegistry& registry) {
    if (p.dim() != 1) throw std::invalid_argument("trig: PolyZonotope is not scalar");
    if (degree < 1) throw std::invalid_argument("trig: degree must be at least 1");
    std::vector<PolyZonotope> powers;
    if (p.is_point()) return powers;
    const PolyZonotope dev = p + (-p.center()[0]);
    powers.reserve(static_cast<std::size_t>(degree + 1));
    powers.push_back(PolyZonotope::constant(1.0));
    powers.push_back(dev);
    for (int n = 2; n <= degree; ++n) {
        PolyZonotope next = multiply(powers.back(), dev);
        if (budget > 0) next = reduce(next, budget, registry);
        powers.push_back(std::move(next));
    }
    return powers;
}

}  // namespace

PolyZonotope trig(TrigFn fn, const PolyZonotope& p, int degree, IdRegistry& registry, std::size_t budget) {
    return taylor(fn, p, deviation_powers(p, degree, budget, registry), degree, registry);
}

SinCos sincos(const PolyZonotope& p, int degree, IdRegistry& registry, std::size_t budget) {
    const auto powers = deviation_powers(p, degree, budget, registry);
    PolyZonotope s = taylor(TrigFn::sin, p, powers, degree, registry);
    PolyZonotope c = taylor(TrigFn::cos, p, powers, degree, registry);
    return {std::move(s), std::move(c)};
}

Zonotope to_zonotope(const PolyZonotope& p) {
    Eigen::VectorXd center = p.center();
    Eigen::MatrixXd gens(p.dim(), static_cast<Eigen::Index>(p.num_terms()));
    for (std::size_t t = 0; t < p.num_terms(); ++t) {
        const auto e = p.exponent(t);
        int nonzero = 0, total = 0;
        bool all_even = true;
        for (auto v : e) {
            if (v == 0) continue;
            ++nonzero;
            total += v;
            if (v % 2 != 0) all_even = false;
        }
        const auto col = static_cast<Eigen::Index>(t);
        if (nonzero == 1 && total == 1) {
            gens.col(col) = p.generator(t);
        } else if (all_even) {
            // monomial ranges over [0, 1]
            center += 0.5 * p.generator(t);
            gens.col(col) = 0.5 * p.generator(t);
        } else {
            gens.col(col) = p.generator(t);
        }
    }
    return {std::move(center), std::move(gens)};
}

PolyZonotope differentiate(const PolyZonotope& p, IndeterminateId id) {
    const auto& ids = p.ids();
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    const auto d = static_cast<std::size_t>(p.dim());
    if (it == ids.end() || *it != id) return PolyZonotope(Eigen::VectorXd::Zero(p.dim()));
    const auto col = static_cast<std::size_t>(it - ids.begin());
    const std::size_t m = ids.size();

    Exps exps;
    std::vector<double> gens;
    std::size_t rows = 0;
    for (std::size_t t = 0; t < p.num_terms(); ++t) {
        const auto e = p.exponent(t);
        if (e[col] == 0) continue;
        const double k = e[col];
        exps.insert(exps.end(), e.begin(), e.end());
        exps[rows * m + col] = static_cast<std::uint8_t>(e[col] - 1);
        const auto g = p.generator(t);
        for (std::size_t r = 0; r < d; ++r) gens.push_back(k * g[static_cast<Eigen::Index>(r)]);
        ++rows;
    }
    return PzAccess::build(Eigen::VectorXd::Zero(p.dim()), ids, exps, gens, rows);
}

PolyZonotope component(const PolyZonotope& p, int row) {
    if (row < 0 || row >= p.dim()) throw std::out_of_range("component: row out of range");
    std::vector<double> gens(p.num_terms());
    for (std::size_t t = 0; t < p.num_terms(); ++t) gens[t] = p.generator(t)[row];
    return PzAccess::build(Eigen::VectorXd::Constant(1, p.center()[row]), p.ids(), PzAccess::exps(p), gens,
                           p.num_terms());
}

PolyZonotope stack(std::span<const PolyZonotope> scalars) {
    const auto d = static_cast<std::size_t>(scalars.size());
    std::vector<IndeterminateId> ids;
    for (const auto& s : scalars) {
        if (s.dim() != 1) throw std::invalid_argument("stack: entries must be scalar");
        std::vector<IndeterminateId> merged;
        std::set_union(ids.begin(), ids.end(), s.ids().begin(), s.ids().end(), std::back_inserter(merged));
        ids = std::move(merged);
    }
    const std::size_t m = ids.size();
    std::size_t n = 0;
    for (const auto& s : scalars) n += s.num_terms();

    Exps exps(n * m, 0);
    std::vector<double> gens(n * d, 0.0);
    Eigen::VectorXd center(static_cast<Eigen::Index>(d));
    std::size_t row = 0;
    for (std::size_t r = 0; r < d; ++r) {
        const auto& s = scalars[r];
        center[static_cast<Eigen::Index>(r)] = s.center()[0];
        std::vector<std::size_t> map(s.num_ids());
        for (std::size_t c = 0; c < s.num_ids(); ++c)
            map[c] = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), s.ids()[c]) - ids.begin());
        for (std::size_t t = 0; t < s.num_terms(); ++t, ++row) {
            const auto e = s.exponent(t);
            for (std::size_t c = 0; c < e.size(); ++c) exps[row * m + map[c]] = e[c];
            gens[row * d + r] = s.generator(t)[0];
        }
    }
    return PzAccess::build(std::move(center), std::move(ids), exps, gens, n);
}

}  // namespace rdf::pz
