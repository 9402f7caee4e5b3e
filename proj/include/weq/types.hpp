#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace weq {

using Scalar = double;

/// Dense column types used throughout the library. Record-aligned data is
/// held column-wise so estimators reduce to Eigen array expressions.
using Vec = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using IndexVec = Eigen::Array<Eigen::Index, Eigen::Dynamic, 1>;

using Eigen::Index;

/// Closed interval [lo, hi].
struct Interval {
    Scalar lo = 0.0;
    Scalar hi = 0.0;

    bool contains(Scalar x) const { return x >= lo && x <= hi; }
    bool contains(const Interval& other) const {
        return lo <= other.lo && other.hi <= hi;
    }
    bool empty() const { return lo > hi; }
    Scalar width() const { return hi - lo; }

    Interval intersect(const Interval& other) const {
        return {std::max(lo, other.lo), std::min(hi, other.hi)};
    }
};

inline Scalar expit(Scalar x) {
    // Split by sign to avoid overflow in exp().
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const Scalar e = std::exp(x);
    return e / (1.0 + e);
}

inline Scalar clamp01(Scalar x) { return std::min(1.0, std::max(0.0, x)); }

} // namespace weq
