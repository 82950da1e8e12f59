#pragma once

#include "nonlocal/errors.hpp"
#include "nonlocal/interval.hpp"

#include <vector>

namespace nonlocal {

enum class ExtClass { Dirichlet, Neumann };

struct ExtSegment {
    double lo = 0.0;
    double hi = 0.0;
    ExtClass cls = ExtClass::Neumann;
};

/// Partition of the exterior of Omega into Dirichlet and Neumann regions.
/// Segments must tile [a-horizon, a] and [b, b+horizon]; everything beyond
/// the horizon is absorbed into the `beyond` class.
struct ExteriorPartition {
    std::vector<ExtSegment> segments;
    double horizon = 0.0;
    ExtClass beyond = ExtClass::Neumann;

    /// Single-class partition of the whole exterior.
    static ExteriorPartition uniform(ExtClass cls, double horizon_);

    /// Checks the tiling: each side covered without overlap or gap (1e-9 slack).
    void validate(const Interval& omega) const;

    /// Class of an exterior point; segment boundaries resolve to the first
    /// listed segment whose closure contains the point.
    ExtClass classify(double x, const Interval& omega) const;

    bool has_dirichlet() const;
};

}  // namespace nonlocal
