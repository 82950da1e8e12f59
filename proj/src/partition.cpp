#include "nonlocal/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nonlocal {

ExteriorPartition ExteriorPartition::uniform(ExtClass cls, double horizon_) {
    ExteriorPartition p;
    p.horizon = horizon_;
    p.beyond = cls;
    p.segments.push_back({-1.0, 0.0, cls});  // placeholders; fixed in validate
    p.segments.clear();
    return p;
}

void ExteriorPartition::validate(const Interval& omega) const {
    if (!(horizon > 0.0)) throw ValidationError("partition: horizon must be positive");
    const double tol = 1e-9 * std::max(1.0, horizon);
    std::vector<ExtSegment> left, right;
    for (const auto& seg : segments) {
        if (!(seg.lo < seg.hi)) throw ValidationError("partition: segment needs lo < hi");
        if (seg.hi <= omega.a + tol && seg.lo >= omega.a - horizon - tol) {
            left.push_back(seg);
        } else if (seg.lo >= omega.b - tol && seg.hi <= omega.b + horizon + tol) {
            right.push_back(seg);
        } else {
            std::ostringstream msg;
            msg << "partition: segment [" << seg.lo << ", " << seg.hi
                << "] must lie on one side of Omega within the horizon";
            throw ValidationError(msg.str());
        }
    }
    auto check_side = [&](std::vector<ExtSegment>& side, double lo, double hi, const char* name) {
        if (side.empty()) {
            if (segments.empty()) return;  // fully uniform partitions carry no segments
            std::ostringstream msg;
            msg << "partition: no segments cover the " << name << " exterior";
            throw ValidationError(msg.str());
        }
        std::sort(side.begin(), side.end(),
                  [](const ExtSegment& a, const ExtSegment& b) { return a.lo < b.lo; });
        if (std::abs(side.front().lo - lo) > tol || std::abs(side.back().hi - hi) > tol) {
            std::ostringstream msg;
            msg << "partition: " << name << " exterior [" << lo << ", " << hi
                << "] is not fully covered";
            throw ValidationError(msg.str());
        }
        for (std::size_t k = 0; k + 1 < side.size(); ++k) {
            if (std::abs(side[k].hi - side[k + 1].lo) > tol) {
                std::ostringstream msg;
                msg << "partition: gap or overlap at " << side[k].hi << " on the " << name
                    << " side";
                throw ValidationError(msg.str());
            }
        }
    };
    check_side(left, omega.a - horizon, omega.a, "left");
    check_side(right, omega.b, omega.b + horizon, "right");
}

ExtClass ExteriorPartition::classify(double x, const Interval& omega) const {
    if (omega.contains_closed(x)) {
        throw ValidationError("partition: cannot classify an interior point");
    }
    if (omega.dist(x) > horizon) return beyond;
    for (const auto& seg : segments) {
        if (x >= seg.lo && x <= seg.hi) return seg.cls;
    }
    return beyond;
}

bool ExteriorPartition::has_dirichlet() const {
    if (beyond == ExtClass::Dirichlet) return true;
    for (const auto& seg : segments) {
        if (seg.cls == ExtClass::Dirichlet) return true;
    }
    return false;
}

}  // namespace nonlocal
