#include "weq/bias.hpp"

#include "weq/errors.hpp"

#include <cmath>

namespace weq {

namespace {

struct Cells {
    Vec h1;
    Vec numerator;  // h1 * h2
    Vec complement; // h1 * (1 - h2)
};

Cells make_cells(const AuditDataset& ds, const MetricSpec& spec) {
    Cells c;
    c.h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    c.numerator = c.h1 * h2;
    c.complement = c.h1 * (1.0 - h2);
    return c;
}

Scalar cell_mean(const Vec& values, const Vec& mask, const MetricSpec& spec,
                 const std::string& group, const char* which) {
    const Scalar mass = mask.sum();
    if (mass <= 0.0) {
        throw UndefinedMetricError(metric_name(spec.kind) + ", group '" +
                                   group + "': conditioning cell " + which +
                                   " is empty");
    }
    return (values * mask).sum() / mass;
}

} // namespace

Scalar empirical_bias(const AuditDataset& ds, const MetricSpec& spec,
                      const std::string& group) {
    return weighted_metric(ds, spec, group).value -
           oracle_metric(ds, spec, group).value;
}

EpsilonPair epsilon_sample(const AuditDataset& ds, const MetricSpec& spec,
                           const std::string& group) {
    const Cells c = make_cells(ds, spec);
    const Vec pi = ds.group_probs(group);
    const Vec ind = ds.group_indicator(group);
    // Difference of cell means rather than the mean difference: shares the
    // arithmetic of epsilon_bounds, so the sample value always lands inside
    // the bounds.
    EpsilonPair e;
    e.eps = cell_mean(pi, c.numerator, spec, group, "(h1*h2 = 1)") -
            cell_mean(ind, c.numerator, spec, group, "(h1*h2 = 1)");
    e.eps_prime =
        cell_mean(pi, c.complement, spec, group, "(h1*(1-h2) = 1)") -
        cell_mean(ind, c.complement, spec, group, "(h1*(1-h2) = 1)");
    return e;
}

EpsilonBounds epsilon_bounds(const AuditDataset& ds, const MetricSpec& spec,
                             const std::string& group) {
    const Cells c = make_cells(ds, spec);
    const Vec pi = ds.group_probs(group);
    EpsilonBounds b;
    b.cell_mean = cell_mean(pi, c.numerator, spec, group, "(h1*h2 = 1)");
    b.cell_mean_prime =
        cell_mean(pi, c.complement, spec, group, "(h1*(1-h2) = 1)");
    b.eps = {b.cell_mean - 1.0, b.cell_mean};
    b.eps_prime = {b.cell_mean_prime - 1.0, b.cell_mean_prime};
    return b;
}

Scalar bias_estimate(const BiasInputs& inputs, const EpsilonPair& eps_pair) {
    if (inputs.base_rate <= 0.0) {
        throw ValidationError("base_rate must be positive");
    }
    return ((1.0 - inputs.nu_w) * inputs.nu * eps_pair.eps -
            inputs.nu_w * (1.0 - inputs.nu) * eps_pair.eps_prime) /
           inputs.base_rate;
}

DeltaPair deltas(const AuditDataset& ds, const MetricSpec& spec,
                 const std::string& group) {
    const Cells c = make_cells(ds, spec);
    const Vec pi = ds.group_probs(group);
    const Vec ind = ds.group_indicator(group);
    DeltaPair d;
    d.delta = ((pi - ind) * c.numerator).mean();
    d.delta_star = ((ind - pi) * c.h1).mean();
    return d;
}

bool bound_assumption_check(const DeltaPair& d) {
    return std::abs(d.delta) <= std::abs(d.delta_star);
}

bool same_sign_condition(const EpsilonPair& e) {
    return e.eps * e.eps_prime >= 0.0;
}

Scalar bias_bound(Scalar nu_w, Scalar pi_mass_ratio) {
    if (pi_mass_ratio <= 0.0) {
        throw ValidationError("pi mass ratio must be positive");
    }
    return (1.0 + nu_w) * std::abs(1.0 - pi_mass_ratio);
}

Scalar pi_mass_ratio_sample(const AuditDataset& ds, const MetricSpec& spec,
                            const std::string& group) {
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Scalar den = (ds.group_indicator(group) * h1).sum();
    if (den <= 0.0) {
        throw UndefinedMetricError(metric_name(spec.kind) + ", group '" +
                                   group +
                                   "': indicator mass over h1 = 1 is zero");
    }
    return (ds.group_probs(group) * h1).sum() / den;
}

Scalar pi_mass_ratio_population(const AuditDataset& ds, const MetricSpec& spec,
                                const std::string& group, Scalar base_rate,
                                Scalar h1_rate) {
    if (base_rate <= 0.0 || h1_rate <= 0.0) {
        throw ValidationError(
            "population base_rate and h1_rate must be positive");
    }
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    return (ds.group_probs(group) * h1).mean() / (base_rate * h1_rate);
}

Scalar sample_base_rate(const AuditDataset& ds, const MetricSpec& spec,
                        const std::string& group) {
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Scalar mass = h1.sum();
    if (mass <= 0.0) {
        throw UndefinedMetricError(metric_name(spec.kind) + ", group '" +
                                   group + "': h1 = 1 cell is empty");
    }
    return (ds.group_indicator(group) * h1).sum() / mass;
}

Scalar sample_h1_rate(const AuditDataset& ds, const MetricSpec& spec) {
    return cell_values(spec.h1, ds.y, ds.y_hat).mean();
}

} // namespace weq
