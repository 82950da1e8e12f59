#pragma once

#include "nonlocal/errors.hpp"

namespace nonlocal {

/// Open interval (a, b), the domain Omega of all problems in this library.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!(a < b)) throw ValidationError("interval requires a < b");
    }

    double length() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }

    bool contains(double x) const { return x > a && x < b; }
    bool contains_closed(double x) const { return x >= a && x <= b; }

    /// Distance from an exterior point to the nearest endpoint.
    double dist(double x) const {
        if (x <= a) return a - x;
        if (x >= b) return x - b;
        return 0.0;
    }
};

}  // namespace nonlocal
