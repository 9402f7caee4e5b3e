#include "weq/sensitivity.hpp"

#include "weq/errors.hpp"
#include "weq/numeric.hpp"
#include "weq/rng.hpp"

#include <cmath>
#include <ostream>

namespace weq {

Interval RangeSpec::resolve(Scalar cell_mean, const Interval& bound) const {
    Interval raw = interval;
    if (kind == Kind::Relative) {
        const Scalar half = std::abs(level * cell_mean);
        raw = {-half, half};
    }
    return raw.intersect(bound);
}

Scalar corrected_estimate(Scalar nu_w, Scalar bias_value, bool add_bias) {
    return clamp01(add_bias ? nu_w + bias_value : nu_w - bias_value);
}

namespace {

void check_config(const SensitivityConfig& c) {
    if (!(c.base_rate > 0.0 && c.base_rate <= 1.0)) {
        throw ValidationError("base_rate must lie in (0,1]");
    }
    if (c.bootstrap_reps < 1) {
        throw ValidationError("bootstrap_reps must be >= 1");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        throw ValidationError("alpha must lie in (0,1)");
    }
    if (c.grid_resolution < 1) {
        throw ValidationError("grid_resolution must be >= 1");
    }
}

/// Corner layout: 0 = (lo, lo'), 1 = (lo, hi'), 2 = (hi, lo'), 3 = (hi, hi').
std::array<EpsilonPair, 4> box_corners(const Interval& e, const Interval& ep) {
    return {EpsilonPair{e.lo, ep.lo}, EpsilonPair{e.lo, ep.hi},
            EpsilonPair{e.hi, ep.lo}, EpsilonPair{e.hi, ep.hi}};
}

struct CellSums {
    Scalar pi_h1 = 0.0;    // sum pi * h1
    Scalar pi_h1h2 = 0.0;  // sum pi * h1 * h2
    Scalar h1 = 0.0;       // sum h1
    Scalar h1h2 = 0.0;     // sum h1 * h2

    bool usable() const {
        // Both conditioning cells and both denominators must carry mass.
        return pi_h1 > 0.0 && h1 > 0.0 && h1h2 > 0.0 && h1 - h1h2 > 0.0;
    }
    Scalar nu_w() const { return pi_h1h2 / pi_h1; }
    Scalar nu() const { return h1h2 / h1; }
    Scalar cell_mean() const { return pi_h1h2 / h1h2; }
    Scalar cell_mean_prime() const { return (pi_h1 - pi_h1h2) / (h1 - h1h2); }
};

} // namespace

Interval plausible_interval(const SensitivityResult& r, CornerMode mode) {
    Interval out{std::numeric_limits<Scalar>::infinity(),
                 -std::numeric_limits<Scalar>::infinity()};
    for (int k = 0; k < 4; ++k) {
        if (mode == CornerMode::Aligned && (k == 1 || k == 2)) continue;
        if (mode == CornerMode::Opposed && (k == 0 || k == 3)) continue;
        out.lo = std::min(out.lo, r.corners[static_cast<std::size_t>(k)].mean);
        out.hi = std::max(out.hi, r.corners[static_cast<std::size_t>(k)].mean);
    }
    return out;
}

Interval sensitivity_interval_of(const SensitivityResult& r, CornerMode mode) {
    Interval out{std::numeric_limits<Scalar>::infinity(),
                 -std::numeric_limits<Scalar>::infinity()};
    for (int k = 0; k < 4; ++k) {
        if (mode == CornerMode::Aligned && (k == 1 || k == 2)) continue;
        if (mode == CornerMode::Opposed && (k == 0 || k == 3)) continue;
        out.lo = std::min(out.lo, r.corners[static_cast<std::size_t>(k)].p_lo);
        out.hi = std::max(out.hi, r.corners[static_cast<std::size_t>(k)].p_hi);
    }
    return out;
}

SensitivityResult run_sensitivity(const AuditDataset& ds, const MetricSpec& spec,
                                  const std::string& group,
                                  const SensitivityConfig& config) {
    check_config(config);

    SensitivityResult res;
    res.weighted_estimate = weighted_metric(ds, spec, group).value;
    res.marginal_estimate = marginal_metric(ds, spec).value;
    res.bounds = epsilon_bounds(ds, spec, group);
    res.eps_range = config.eps_range.resolve(res.bounds.cell_mean, res.bounds.eps);
    res.eps_prime_range = config.eps_prime_range.resolve(
        res.bounds.cell_mean_prime, res.bounds.eps_prime);
    if (res.eps_range.empty() || res.eps_prime_range.empty()) {
        throw InfeasibleRangeError(
            "requested sensitivity range does not intersect the feasible "
            "epsilon bounds; widen the range or check the group probabilities");
    }

    const BiasInputs full{res.weighted_estimate, res.marginal_estimate,
                          config.base_rate, 1.0};
    const auto corners = box_corners(res.eps_range, res.eps_prime_range);
    for (std::size_t k = 0; k < 4; ++k) {
        res.corners[k].eps = corners[k].eps;
        res.corners[k].eps_prime = corners[k].eps_prime;
        res.corners[k].corrected_full = corrected_estimate(
            res.weighted_estimate, bias_estimate(full, corners[k]),
            config.add_bias);
    }

    // Per-record masses; bootstrap replications reduce these four columns.
    const Vec pi = ds.group_probs(group);
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    const Vec pi_h1 = pi * h1;
    const Vec pi_h1h2 = pi_h1 * h2;
    const Vec h1h2 = h1 * h2;
    const Index n = ds.n();

    const int reps = config.bootstrap_reps;
    std::array<std::vector<Scalar>, 4> corrected;
    for (auto& v : corrected) v.reserve(static_cast<std::size_t>(reps));
    int skipped = 0;

    for (int b = 0; b < reps; ++b) {
        CellSums s;
        if (config.resample) {
            RngStream stream = RngStream::derive(config.seed, {0xB007u, static_cast<std::uint64_t>(b)});
            for (Index i = 0; i < n; ++i) {
                const Index j = static_cast<Index>(
                    stream.uniform_index(static_cast<std::uint64_t>(n)));
                s.pi_h1 += pi_h1[j];
                s.pi_h1h2 += pi_h1h2[j];
                s.h1 += h1[j];
                s.h1h2 += h1h2[j];
            }
        } else {
            s.pi_h1 = pi_h1.sum();
            s.pi_h1h2 = pi_h1h2.sum();
            s.h1 = h1.sum();
            s.h1h2 = h1h2.sum();
        }
        if (!s.usable()) {
            ++skipped;
            continue;
        }
        const Interval eb{s.cell_mean() - 1.0, s.cell_mean()};
        const Interval ebp{s.cell_mean_prime() - 1.0, s.cell_mean_prime()};
        const Interval er = config.eps_range.resolve(s.cell_mean(), eb);
        const Interval erp =
            config.eps_prime_range.resolve(s.cell_mean_prime(), ebp);
        if (er.empty() || erp.empty()) {
            ++skipped;
            continue;
        }
        const BiasInputs in{s.nu_w(), s.nu(), config.base_rate, 1.0};
        const auto reps_corners = box_corners(er, erp);
        for (std::size_t k = 0; k < 4; ++k) {
            corrected[k].push_back(corrected_estimate(
                in.nu_w, bias_estimate(in, reps_corners[k]), config.add_bias));
        }
    }

    if (corrected[0].empty()) {
        throw UndefinedMetricError(
            metric_name(spec.kind) + ", group '" + group +
            "': every bootstrap replication had an empty cell");
    }

    for (std::size_t k = 0; k < 4; ++k) {
        res.corners[k].mean = mean_of(corrected[k]);
        res.corners[k].p_lo = percentile(corrected[k], config.alpha / 2.0);
        res.corners[k].p_hi = percentile(corrected[k], 1.0 - config.alpha / 2.0);
    }
    res.bootstrap_reps = reps;
    res.skipped_reps = skipped;
    res.plausible_mean_interval = plausible_interval(res, CornerMode::Box);
    res.sensitivity_interval = sensitivity_interval_of(res, CornerMode::Box);
    return res;
}

namespace {

std::vector<Scalar> linspace(const Interval& iv, int points) {
    std::vector<Scalar> out;
    if (points == 1 || iv.width() == 0.0) {
        out.push_back(0.5 * (iv.lo + iv.hi));
        return out;
    }
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const Scalar t =
            static_cast<Scalar>(i) / static_cast<Scalar>(points - 1);
        out.push_back(iv.lo + t * (iv.hi - iv.lo));
    }
    // Pin the last point to the exact endpoint.
    out.back() = iv.hi;
    return out;
}

} // namespace

std::vector<GridRow> contour_grid(const AuditDataset& ds, const MetricSpec& spec,
                                  const std::string& group,
                                  const SensitivityConfig& config) {
    check_config(config);
    const Scalar nu_w = weighted_metric(ds, spec, group).value;
    const Scalar nu = marginal_metric(ds, spec).value;
    const EpsilonBounds bounds = epsilon_bounds(ds, spec, group);

    // Feasibility gate matches run_sensitivity.
    const Interval er = config.eps_range.resolve(bounds.cell_mean, bounds.eps);
    const Interval erp = config.eps_prime_range.resolve(bounds.cell_mean_prime,
                                                        bounds.eps_prime);
    if (er.empty() || erp.empty()) {
        throw InfeasibleRangeError(
            "requested sensitivity range does not intersect the feasible "
            "epsilon bounds; widen the range or check the group probabilities");
    }

    // The grid spans the requested range; infeasible grid points are dropped.
    Interval raw_e = config.eps_range.kind == RangeSpec::Kind::Relative
                         ? Interval{-std::abs(config.eps_range.level * bounds.cell_mean),
                                    std::abs(config.eps_range.level * bounds.cell_mean)}
                         : config.eps_range.interval;
    Interval raw_ep =
        config.eps_prime_range.kind == RangeSpec::Kind::Relative
            ? Interval{-std::abs(config.eps_prime_range.level * bounds.cell_mean_prime),
                       std::abs(config.eps_prime_range.level * bounds.cell_mean_prime)}
            : config.eps_prime_range.interval;

    const BiasInputs inputs{nu_w, nu, config.base_rate, 1.0};
    std::vector<GridRow> rows;
    for (Scalar e : linspace(raw_e, config.grid_resolution)) {
        if (!bounds.eps.contains(e)) continue;
        for (Scalar ep : linspace(raw_ep, config.grid_resolution)) {
            if (!bounds.eps_prime.contains(ep)) continue;
            GridRow row;
            row.eps = e;
            row.eps_prime = ep;
            row.bias = bias_estimate(inputs, {e, ep});
            row.corrected = corrected_estimate(nu_w, row.bias, config.add_bias);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
    out << "eps,eps_prime,bias,corrected\n";
    for (const auto& r : rows) {
        out << format_double(r.eps) << ',' << format_double(r.eps_prime) << ','
            << format_double(r.bias) << ',' << format_double(r.corrected)
            << "\n";
    }
}

} // namespace weq
