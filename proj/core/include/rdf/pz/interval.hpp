#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdf::pz {

/// Closed real interval [lo, hi] with outward-sound arithmetic for the
/// handful of operations the Taylor remainder needs.
class Interval {
public:
    constexpr Interval() = default;
    constexpr explicit Interval(double point) : lo_(point), hi_(point) {}
    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) throw std::invalid_argument("Interval: lo > hi");
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const { return 0.5 * (lo_ + hi_); }
    double radius() const { return 0.5 * (hi_ - lo_); }
    double width() const { return hi_ - lo_; }
    double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }
    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }

    friend Interval operator+(const Interval& a, const Interval& b) { return {a.lo_ + b.lo_, a.hi_ + b.hi_}; }
    friend Interval operator-(const Interval& a, const Interval& b) { return {a.lo_ - b.hi_, a.hi_ - b.lo_}; }
    friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }
    friend Interval operator*(const Interval& a, const Interval& b);
    friend Interval operator*(double s, const Interval& a) {
        return s >= 0 ? Interval{s * a.lo_, s * a.hi_} : Interval{s * a.hi_, s * a.lo_};
    }
    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval sin(const Interval& x);
Interval cos(const Interval& x);

/// Range of the n-th derivative of sin (or cos) over x.
Interval sin_derivative(int n, const Interval& x);
Interval cos_derivative(int n, const Interval& x);

}  // namespace rdf::pz
