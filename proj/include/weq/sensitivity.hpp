#pragma once

#include "weq/bias.hpp"
#include "weq/dataset.hpp"
#include "weq/metrics.hpp"
#include "weq/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace weq {

/// A sensitivity-parameter range, absolute ([lo, hi]) or relative: a level
/// rho expands to [-rho*m, rho*m] where m is the mean group probability in
/// the parameter's conditioning cell. Either form is intersected with the
/// feasible epsilon bounds before use.
struct RangeSpec {
    enum class Kind { Absolute, Relative };
    Kind kind = Kind::Absolute;
    Interval interval{0.0, 0.0};
    Scalar level = 0.0;

    static RangeSpec absolute(Scalar lo, Scalar hi) {
        RangeSpec r;
        r.kind = Kind::Absolute;
        r.interval = {lo, hi};
        return r;
    }
    static RangeSpec relative(Scalar level) {
        RangeSpec r;
        r.kind = Kind::Relative;
        r.level = level;
        return r;
    }

    Interval resolve(Scalar cell_mean, const Interval& bound) const;
};

struct SensitivityConfig {
    RangeSpec eps_range;
    RangeSpec eps_prime_range;
    int grid_resolution = 21;
    Scalar base_rate = 0.0;     // E[I(A=a)|h1=1], required in (0,1]
    int bootstrap_reps = 1000;
    Scalar alpha = 0.05;
    std::uint64_t seed = 0;
    bool resample = true;       // false: every replication reuses the data
    bool add_bias = false;      // corrected = nu_w + bias instead of nu_w - bias
};

/// Bias-corrected estimate, clamped to [0,1]. Subtracts the bias by default;
/// add_bias flips the convention.
Scalar corrected_estimate(Scalar nu_w, Scalar bias_value, bool add_bias = false);

/// One corner of the (eps, eps') box with its bootstrap statistics.
struct CornerStats {
    Scalar eps = 0.0;            // full-data corner location
    Scalar eps_prime = 0.0;
    Scalar corrected_full = 0.0; // corrected estimate on the full data
    Scalar mean = 0.0;           // bootstrap mean of corrected estimates
    Scalar p_lo = 0.0;           // alpha/2 percentile
    Scalar p_hi = 0.0;           // 1 - alpha/2 percentile
};

/// Which corners of the (eps, eps') box feed an interval. Box is the
/// standard analysis over the full range (extremes sit at the opposed
/// corners); Aligned restricts to sign-aligned error in both cells and
/// Opposed to sign-opposed error.
enum class CornerMode { Box, Aligned, Opposed };

/// Corner order: 0 = (lo, lo'), 1 = (lo, hi'), 2 = (hi, lo'), 3 = (hi, hi').
struct SensitivityResult {
    Scalar weighted_estimate = 0.0;
    Scalar marginal_estimate = 0.0;
    EpsilonBounds bounds;                 // full-data feasible bounds
    Interval eps_range;                   // resolved, full data
    Interval eps_prime_range;
    std::array<CornerStats, 4> corners;
    Interval plausible_mean_interval;     // min/max of corner means (Box)
    Interval sensitivity_interval;        // union of corner percentile bounds
    int bootstrap_reps = 0;
    int skipped_reps = 0;                 // resamples with an empty cell
};

Interval plausible_interval(const SensitivityResult& r, CornerMode mode);
Interval sensitivity_interval_of(const SensitivityResult& r, CornerMode mode);

/// Nonparametric-bootstrap sensitivity analysis. Replication b draws its
/// resample from a stream derived from (seed, b), so results are identical
/// for any execution order. Throws InfeasibleRangeError when the requested
/// range does not intersect the feasible bounds on the full data.
SensitivityResult run_sensitivity(const AuditDataset& ds, const MetricSpec& spec,
                                  const std::string& group,
                                  const SensitivityConfig& config);

struct GridRow {
    Scalar eps = 0.0;
    Scalar eps_prime = 0.0;
    Scalar bias = 0.0;
    Scalar corrected = 0.0;
};

/// Plug-in bias over the requested (eps, eps') grid; rows outside the
/// feasible bounds are omitted.
std::vector<GridRow> contour_grid(const AuditDataset& ds, const MetricSpec& spec,
                                  const std::string& group,
                                  const SensitivityConfig& config);

/// CSV with header eps,eps_prime,bias,corrected.
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

} // namespace weq
