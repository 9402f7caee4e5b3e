#include "weq/metrics.hpp"

#include "weq/errors.hpp"

#include <algorithm>
#include <cctype>

namespace weq {

Scalar eval_cell(CellFn fn, Scalar y, Scalar y_hat) {
    switch (fn) {
        case CellFn::One: return 1.0;
        case CellFn::Outcome: return y;
        case CellFn::NotOutcome: return 1.0 - y;
        case CellFn::Pred: return y_hat;
        case CellFn::NotPred: return 1.0 - y_hat;
        case CellFn::Mismatch: return (y != y_hat) ? 1.0 : 0.0;
    }
    return 0.0;
}

Vec cell_values(CellFn fn, const Vec& y, const Vec& y_hat) {
    switch (fn) {
        case CellFn::One: return Vec::Ones(y.size());
        case CellFn::Outcome: return y;
        case CellFn::NotOutcome: return 1.0 - y;
        case CellFn::Pred: return y_hat;
        case CellFn::NotPred: return 1.0 - y_hat;
        case CellFn::Mismatch: return (y != y_hat).cast<Scalar>();
    }
    return Vec::Zero(y.size());
}

MetricSpec metric_spec(MetricKind kind) {
    switch (kind) {
        case MetricKind::FNR:
            return {kind, CellFn::Outcome, CellFn::NotPred};
        case MetricKind::FPR:
            return {kind, CellFn::NotOutcome, CellFn::Pred};
        case MetricKind::PPV:
            return {kind, CellFn::Pred, CellFn::Outcome};
        case MetricKind::NPV:
            return {kind, CellFn::NotPred, CellFn::NotOutcome};
        case MetricKind::SelectionRate:
            return {kind, CellFn::One, CellFn::Pred};
        case MetricKind::ErrorRate:
            return {kind, CellFn::One, CellFn::Mismatch};
    }
    throw UndefinedMetricError("unknown metric kind");
}

MetricKind parse_metric_kind(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
    if (s == "fnr") return MetricKind::FNR;
    if (s == "fpr") return MetricKind::FPR;
    if (s == "ppv") return MetricKind::PPV;
    if (s == "npv") return MetricKind::NPV;
    if (s == "selection_rate") return MetricKind::SelectionRate;
    if (s == "error_rate") return MetricKind::ErrorRate;
    throw UndefinedMetricError(
        "unknown metric '" + name +
        "' (expected one of fnr, fpr, ppv, npv, selection_rate, error_rate)");
}

std::string metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::FNR: return "fnr";
        case MetricKind::FPR: return "fpr";
        case MetricKind::PPV: return "ppv";
        case MetricKind::NPV: return "npv";
        case MetricKind::SelectionRate: return "selection_rate";
        case MetricKind::ErrorRate: return "error_rate";
    }
    return "?";
}

namespace {

std::string cell_name(CellFn fn) {
    switch (fn) {
        case CellFn::One: return "1";
        case CellFn::Outcome: return "Y";
        case CellFn::NotOutcome: return "1-Y";
        case CellFn::Pred: return "Yhat";
        case CellFn::NotPred: return "1-Yhat";
        case CellFn::Mismatch: return "Y!=Yhat";
    }
    return "?";
}

MetricEstimate ratio_estimate(const MetricSpec& spec, const Vec& weight,
                              const Vec& h1, const Vec& h2,
                              EstimatorKind estimator,
                              const std::string& context) {
    MetricEstimate est;
    est.estimator = estimator;
    est.denominator_mass = (weight * h1).sum();
    est.numerator_mass = (weight * h1 * h2).sum();
    if (est.denominator_mass <= 0.0) {
        throw UndefinedMetricError(
            metric_name(spec.kind) + " undefined" + context +
            ": denominator cell (h1 = " + cell_name(spec.h1) +
            ") has zero mass");
    }
    est.value = est.numerator_mass / est.denominator_mass;
    return est;
}

} // namespace

MetricEstimate weighted_metric(const AuditDataset& ds, const MetricSpec& spec,
                               const std::string& group) {
    const Vec pi = ds.group_probs(group);
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    return ratio_estimate(spec, pi, h1, h2, EstimatorKind::Weighted,
                          " for group '" + group + "' (weighted)");
}

MetricEstimate oracle_metric(const AuditDataset& ds, const MetricSpec& spec,
                             const std::string& group) {
    const Vec ind = ds.group_indicator(group);
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    return ratio_estimate(spec, ind, h1, h2, EstimatorKind::Oracle,
                          " for group '" + group + "' (oracle)");
}

MetricEstimate marginal_metric(const AuditDataset& ds, const MetricSpec& spec) {
    const Vec ones = Vec::Ones(ds.n());
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    return ratio_estimate(spec, ones, h1, h2, EstimatorKind::Marginal,
                          " (marginal)");
}

} // namespace weq
