#pragma once

#include "weq/dataset.hpp"
#include "weq/metrics.hpp"
#include "weq/types.hpp"

#include <string>

namespace weq {

/// Mean group-probability error conditional on the metric's numerator cell
/// (h1*h2 = 1) and on its complement within the denominator (h1*(1-h2) = 1).
struct EpsilonPair {
    Scalar eps = 0.0;
    Scalar eps_prime = 0.0;
};

/// Joint expectations of probability error with the numerator cell and the
/// denominator event: delta = mean((pi - I)*h1*h2), delta_star =
/// mean((I - pi)*h1), both over all records.
struct DeltaPair {
    Scalar delta = 0.0;
    Scalar delta_star = 0.0;
};

/// Scalar inputs to the plug-in bias formula. base_rate is E[I(A=a)|h1=1]:
/// a sample mean in labeled/simulation runs, a population figure in audit
/// runs. h1_rate (E[h1]) is used only when assembling the bound's
/// denominator from population sources.
struct BiasInputs {
    Scalar nu_w = 0.0;      // weighted estimate
    Scalar nu = 0.0;        // marginal estimate
    Scalar base_rate = 0.0; // E[I(A=a) | h1=1], in (0,1]
    Scalar h1_rate = 1.0;   // E[h1], in (0,1]
};

/// Finite-sample bias: weighted minus oracle estimate. Requires labels.
Scalar empirical_bias(const AuditDataset& ds, const MetricSpec& spec,
                      const std::string& group);

/// Sample means of pi - I(A=a) over the two conditioning cells. Requires
/// labels; throws UndefinedMetricError naming any empty cell.
EpsilonPair epsilon_sample(const AuditDataset& ds, const MetricSpec& spec,
                           const std::string& group);

struct EpsilonBounds {
    Interval eps;       // [m-1, m], m = mean(pi | h1*h2=1)
    Interval eps_prime; // [m'-1, m'], m' = mean(pi | h1*(1-h2)=1)
    Scalar cell_mean = 0.0;       // m
    Scalar cell_mean_prime = 0.0; // m'
};

/// Feasible ranges implied by I(A=a) lying in {0,1}; computable without
/// true labels.
EpsilonBounds epsilon_bounds(const AuditDataset& ds, const MetricSpec& spec,
                             const std::string& group);

/// Plug-in bias: [(1-nu_w)*nu*eps - nu_w*(1-nu)*eps'] / base_rate.
Scalar bias_estimate(const BiasInputs& inputs, const EpsilonPair& eps_pair);

/// Sample delta / delta_star. Requires labels.
DeltaPair deltas(const AuditDataset& ds, const MetricSpec& spec,
                 const std::string& group);

/// |delta| <= |delta_star|; licenses the bias bound.
bool bound_assumption_check(const DeltaPair& d);

/// eps * eps' >= 0 (zero counts as either sign). When true, the bias bound
/// applies without true labels.
bool same_sign_condition(const EpsilonPair& e);

/// (1 + nu_w) * |1 - pi_mass_ratio|, with pi_mass_ratio =
/// E[pi*h1] / E[I(A=a)*h1]. Caller is responsible for having verified
/// the bound's validity condition (or the same-sign condition).
Scalar bias_bound(Scalar nu_w, Scalar pi_mass_ratio);

/// Sample ratio sum(pi*h1) / sum(I*h1). Requires labels.
Scalar pi_mass_ratio_sample(const AuditDataset& ds, const MetricSpec& spec,
                            const std::string& group);

/// Audit-mode ratio mean(pi*h1) / (base_rate * h1_rate), with the
/// denominator supplied from population sources.
Scalar pi_mass_ratio_population(const AuditDataset& ds, const MetricSpec& spec,
                                const std::string& group, Scalar base_rate,
                                Scalar h1_rate);

/// Sample value of E[I(A=a)|h1=1]. Requires labels.
Scalar sample_base_rate(const AuditDataset& ds, const MetricSpec& spec,
                        const std::string& group);

/// Sample value of E[h1].
Scalar sample_h1_rate(const AuditDataset& ds, const MetricSpec& spec);

} // namespace weq
