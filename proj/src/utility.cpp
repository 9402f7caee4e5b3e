#include "weq/utility.hpp"

#include "weq/bias.hpp"
#include "weq/errors.hpp"
#include "weq/numeric.hpp"
#include "weq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace weq {

namespace {

void check_inputs(const UtilityInputs& in) {
    auto unit = [](Scalar v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(in.p0) || !unit(in.p1) || std::abs(in.p0 + in.p1 - 1.0) > 1e-9) {
        throw ValidationError("p0, p1 must lie in [0,1] and sum to 1");
    }
    if (!unit(in.tau0) || !unit(in.tau1)) {
        throw ValidationError("tau0, tau1 must lie in [0,1]");
    }
    if (!(in.r > 0.0)) throw ValidationError("r must be positive");
}

} // namespace

Scalar expected_utility(const UtilityInputs& in) {
    check_inputs(in);
    return in.p0 * (1.0 - in.tau0) * in.r + in.p1 * (1.0 - in.tau1);
}

Interval admissible_r_interval(const UtilityInputs& in) {
    const Scalar lo = in.p0 > 0.0
                          ? in.p1 / in.p0
                          : std::numeric_limits<Scalar>::infinity();
    const Scalar hi = in.P1 < 1.0
                          ? in.P1 / (1.0 - in.P1)
                          : std::numeric_limits<Scalar>::infinity();
    return {lo, hi};
}

bool r_admissible(const UtilityInputs& in) {
    const Interval iv = admissible_r_interval(in);
    return in.r > iv.lo && in.r < iv.hi;
}

Scalar select_threshold(const Vec& scores, const Vec& outcomes, Scalar r) {
    const Index n = scores.size();
    if (n == 0 || outcomes.size() != n) {
        throw ValidationError("select_threshold: size mismatch or empty input");
    }
    if (!(r > 0.0)) throw ValidationError("r must be positive");
    const Scalar n1 = outcomes.sum();
    const Scalar n0 = static_cast<Scalar>(n) - n1;
    if (n1 == 0.0 || n0 == 0.0) {
        throw UndefinedMetricError(
            "select_threshold: both outcome classes must be present");
    }
    const Scalar p1 = n1 / static_cast<Scalar>(n);
    const Scalar p0 = 1.0 - p1;

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] < scores[b]; });

    std::vector<Scalar> candidates;
    candidates.push_back(0.0);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const Scalar a = scores[order[i]];
        const Scalar b = scores[order[i + 1]];
        if (a != b) candidates.push_back(0.5 * (a + b));
    }
    candidates.push_back(1.0);

    // Sweep candidates in ascending order; records with score <= tau flip to
    // a negative prediction as tau passes them.
    Scalar fp = 0.0, tp = 0.0; // counts among records still predicted positive
    for (Index i = 0; i < n; ++i) (outcomes[i] == 1.0 ? tp : fp) += 1.0;
    std::size_t next = 0;

    Scalar best_tau = candidates.front();
    Scalar best_eu = -std::numeric_limits<Scalar>::infinity();
    for (const Scalar tau : candidates) {
        while (next < order.size() && scores[order[next]] <= tau) {
            (outcomes[order[next]] == 1.0 ? tp : fp) -= 1.0;
            ++next;
        }
        const Scalar tau0 = fp / n0;
        const Scalar tau1 = (n1 - tp) / n1;
        const Scalar eu = p0 * (1.0 - tau0) * r + p1 * (1.0 - tau1);
        if (eu > best_eu) {
            best_eu = eu;
            best_tau = tau;
        }
    }
    return best_tau;
}

namespace {

Interval propagate_eu(Scalar p0, Scalar p1, Scalar r, const Interval& fpr,
                      const Interval& fnr) {
    // EU is decreasing in both error rates, so interval endpoints map to
    // endpoints.
    const Scalar lo =
        p0 * (1.0 - clamp01(fpr.hi)) * r + p1 * (1.0 - clamp01(fnr.hi));
    const Scalar hi =
        p0 * (1.0 - clamp01(fpr.lo)) * r + p1 * (1.0 - clamp01(fnr.lo));
    return {lo, hi};
}

UtilityIntervalSet make_interval_set(const SensitivityResult& fpr,
                                     const SensitivityResult& fnr,
                                     CornerMode mode, Scalar p0, Scalar p1,
                                     Scalar r) {
    UtilityIntervalSet out;
    out.fpr_plausible = plausible_interval(fpr, mode);
    out.fpr_sensitivity = sensitivity_interval_of(fpr, mode);
    out.fnr_plausible = plausible_interval(fnr, mode);
    out.fnr_sensitivity = sensitivity_interval_of(fnr, mode);
    out.eu_plausible = propagate_eu(p0, p1, r, out.fpr_plausible, out.fnr_plausible);
    out.eu_sensitivity =
        propagate_eu(p0, p1, r, out.fpr_sensitivity, out.fnr_sensitivity);
    return out;
}

} // namespace

GroupUtilityReport group_utility_report(const AuditDataset& ds,
                                        const GroupUtilityConfig& config) {
    if (config.groups.empty()) {
        throw ValidationError("no groups requested for the utility report");
    }
    std::string missing;
    for (const auto& g : config.groups) {
        if (!config.prevalence.count(g)) {
            if (!missing.empty()) missing += ", ";
            missing += g;
        }
    }
    if (!missing.empty()) {
        throw ValidationError(
            "missing outcome prevalence for group(s): " + missing +
            "; supply a prevalence estimate for every reported group");
    }

    GroupUtilityReport report;
    report.r = config.r;
    report.marginal_outcome_rate = ds.y.mean();
    const Scalar y1 = report.marginal_outcome_rate;
    if (y1 <= 0.0 || y1 >= 1.0) {
        throw UndefinedMetricError(
            "utility report needs both outcome classes in the sample");
    }

    const MetricSpec fpr_spec = metric_spec(MetricKind::FPR);
    const MetricSpec fnr_spec = metric_spec(MetricKind::FNR);

    for (std::size_t gi = 0; gi < config.groups.size(); ++gi) {
        const std::string& group = config.groups[gi];
        GroupUtilityEntry entry;
        entry.group = group;
        entry.prevalence = config.prevalence.at(group);
        if (!(entry.prevalence > 0.0 && entry.prevalence < 1.0)) {
            throw ValidationError("prevalence for group '" + group +
                                  "' must lie in (0,1)");
        }
        entry.group_share = ds.group_probs(group).mean();
        entry.base_rate_fnr = entry.prevalence * entry.group_share / y1;
        entry.base_rate_fpr =
            (1.0 - entry.prevalence) * entry.group_share / (1.0 - y1);
        for (Scalar br : {entry.base_rate_fnr, entry.base_rate_fpr}) {
            if (!(br > 0.0 && br <= 1.0)) {
                throw ValidationError(
                    "group '" + group +
                    "': prevalence and sample shares imply a base rate of " +
                    format_double(br) + ", outside (0,1]");
            }
        }

        entry.weighted_fpr = weighted_metric(ds, fpr_spec, group).value;
        entry.weighted_fnr = weighted_metric(ds, fnr_spec, group).value;
        const Scalar p1 = entry.prevalence;
        const Scalar p0 = 1.0 - p1;
        const UtilityInputs point_inputs{
            p0, p1, entry.weighted_fpr, entry.weighted_fnr,
            ds.score ? (*ds.score * ds.y).sum() / ds.y.sum() : 0.0, config.r};
        entry.eu_point = expected_utility(point_inputs);
        entry.r_warning = ds.score && !r_admissible(point_inputs);

        for (std::size_t li = 0; li < config.levels.size(); ++li) {
            const Scalar level = config.levels[li];
            if (level < 0.0) {
                throw ValidationError("relative error levels must be >= 0");
            }
            auto run_for = [&](const MetricSpec& spec, Scalar base_rate,
                               std::uint64_t tag) {
                SensitivityConfig sc;
                sc.eps_range = RangeSpec::relative(level);
                sc.eps_prime_range = RangeSpec::relative(level);
                sc.base_rate = base_rate;
                sc.bootstrap_reps = config.bootstrap_reps;
                sc.alpha = config.alpha;
                sc.seed = mix64(config.seed ^ mix64(gi) ^ mix64(li) ^
                                mix64(tag));
                sc.resample = config.resample;
                sc.add_bias = config.add_bias;
                return run_sensitivity(ds, spec, group, sc);
            };
            const SensitivityResult fpr_res =
                run_for(fpr_spec, entry.base_rate_fpr, 0xF93u);
            const SensitivityResult fnr_res =
                run_for(fnr_spec, entry.base_rate_fnr, 0xF91u);

            GroupUtilityLevel lvl;
            lvl.level = level;
            lvl.uncorrelated = make_interval_set(fpr_res, fnr_res,
                                                 CornerMode::Aligned, p0, p1,
                                                 config.r);
            lvl.correlated = make_interval_set(fpr_res, fnr_res,
                                               CornerMode::Opposed, p0, p1,
                                               config.r);
            entry.levels.push_back(std::move(lvl));
        }
        report.groups.push_back(std::move(entry));
    }
    return report;
}

void write_utility_csv(std::ostream& out, const GroupUtilityReport& report) {
    out << "group,level,mode,quantity,point,plausible_lo,plausible_hi,"
           "sens_lo,sens_hi\n";
    auto line = [&](const GroupUtilityEntry& e, Scalar level, const char* mode,
                    const char* quantity, Scalar point, const Interval& pl,
                    const Interval& se) {
        out << e.group << ',' << format_double(level) << ',' << mode << ','
            << quantity << ',' << format_double(point) << ','
            << format_double(pl.lo) << ',' << format_double(pl.hi) << ','
            << format_double(se.lo) << ',' << format_double(se.hi) << "\n";
    };
    for (const auto& e : report.groups) {
        for (const auto& lvl : e.levels) {
            const struct {
                const char* name;
                const UtilityIntervalSet& set;
            } modes[] = {{"uncorrelated", lvl.uncorrelated},
                         {"correlated", lvl.correlated}};
            for (const auto& m : modes) {
                line(e, lvl.level, m.name, "fpr", e.weighted_fpr,
                     m.set.fpr_plausible, m.set.fpr_sensitivity);
                line(e, lvl.level, m.name, "fnr", e.weighted_fnr,
                     m.set.fnr_plausible, m.set.fnr_sensitivity);
                line(e, lvl.level, m.name, "eu", e.eu_point, m.set.eu_plausible,
                     m.set.eu_sensitivity);
            }
        }
    }
}

} // namespace weq
