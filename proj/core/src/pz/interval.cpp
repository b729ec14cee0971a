#include "rdf/pz/interval.hpp"

#include <numbers>

namespace rdf::pz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// True if some x = phase + 2*pi*m lies in [lo, hi].
bool hits(double lo, double hi, double phase) {
    const double m = std::ceil((lo - phase) / kTwoPi);
    return phase + m * kTwoPi <= hi;
}

Interval widen(double lo, double hi) {
    lo = std::max(-1.0, std::nextafter(lo, -2.0));
    hi = std::min(1.0, std::nextafter(hi, 2.0));
    return {lo, hi};
}

}  // namespace

Interval operator*(const Interval& a, const Interval& b) {
    const double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval sin(const Interval& x) {
    if (x.width() >= kTwoPi) return {-1.0, 1.0};
    const double a = std::sin(x.lo());
    const double b = std::sin(x.hi());
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    if (hits(x.lo(), x.hi(), 0.5 * std::numbers::pi)) hi = 1.0;
    if (hits(x.lo(), x.hi(), -0.5 * std::numbers::pi)) lo = -1.0;
    return widen(lo, hi);
}

Interval cos(const Interval& x) {
    if (x.width() >= kTwoPi) return {-1.0, 1.0};
    const double a = std::cos(x.lo());
    const double b = std::cos(x.hi());
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    if (hits(x.lo(), x.hi(), 0.0)) hi = 1.0;
    if (hits(x.lo(), x.hi(), std::numbers::pi)) lo = -1.0;
    return widen(lo, hi);
}

// d^n/dx^n sin = sin, cos, -sin, -cos for n mod 4 = 0..3.
Interval sin_derivative(int n, const Interval& x) {
    switch (((n % 4) + 4) % 4) {
        case 0: return sin(x);
        case 1: return cos(x);
        case 2: return -sin(x);
        default: return -cos(x);
    }
}

Interval cos_derivative(int n, const Interval& x) { return sin_derivative(n + 1, x); }

}  // namespace rdf::pz
