#pragma once

#include "weq/dataset.hpp"
#include "weq/types.hpp"

#include <array>
#include <string>

namespace weq {

/// Binary functions of (Y, Y_hat), as a closed enumeration over the four
/// confusion cells so metric definitions are mechanically checkable.
enum class CellFn {
    One,       // constant 1
    Outcome,   // Y
    NotOutcome, // 1 - Y
    Pred,      // Y_hat
    NotPred,   // 1 - Y_hat
    Mismatch,  // I(Y != Y_hat)
};

/// Evaluates a cell function on a single (y, y_hat) pair; both in {0,1}.
Scalar eval_cell(CellFn fn, Scalar y, Scalar y_hat);

/// Elementwise evaluation over dataset columns.
Vec cell_values(CellFn fn, const Vec& y, const Vec& y_hat);

enum class MetricKind { FNR, FPR, PPV, NPV, SelectionRate, ErrorRate };

/// A group performance metric expressed as the ratio of expectations of two
/// binary functions of (Y, Y_hat): numerator h1*h2, denominator h1.
struct MetricSpec {
    MetricKind kind;
    CellFn h1;
    CellFn h2;
};

/// Canonical (h1, h2) pair for each metric name.
MetricSpec metric_spec(MetricKind kind);

/// Parses a CLI metric name (case-insensitive: fnr, fpr, ppv, npv,
/// selection_rate, error_rate). Throws UndefinedMetricError on unknown names.
MetricKind parse_metric_kind(const std::string& name);
std::string metric_name(MetricKind kind);

enum class EstimatorKind { Weighted, Oracle, Marginal };

struct MetricEstimate {
    Scalar value = 0.0;
    Scalar numerator_mass = 0.0;
    Scalar denominator_mass = 0.0;
    EstimatorKind estimator = EstimatorKind::Weighted;
};

/// Probability-weighted estimator: sum(pi*h1*h2) / sum(pi*h1).
MetricEstimate weighted_metric(const AuditDataset& ds, const MetricSpec& spec,
                               const std::string& group);

/// Indicator estimator: sum(I(A=a)*h1*h2) / sum(I(A=a)*h1). Requires labels.
MetricEstimate oracle_metric(const AuditDataset& ds, const MetricSpec& spec,
                             const std::string& group);

/// Group-blind estimator: sum(h1*h2) / sum(h1).
MetricEstimate marginal_metric(const AuditDataset& ds, const MetricSpec& spec);

} // namespace weq
