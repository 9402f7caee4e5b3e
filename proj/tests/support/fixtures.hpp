#pragma once

#include "weq/dataset.hpp"
#include "weq/metrics.hpp"
#include "weq/rng.hpp"

#include <string>
#include <vector>

namespace weq::test {

/// Four-record dataset used across suites; every downstream quantity has
/// been worked out by hand: weighted FNR 0.625, oracle FNR 0.5, bias 0.125,
/// eps (0, -0.4), eps bounds ([-0.5,0.5], [-0.4,0.6]), deltas (0, 0.1),
/// bound 0.325.
inline AuditDataset d4() {
    AuditDataset ds;
    ds.y.resize(4);
    ds.y_hat.resize(4);
    ds.probs.resize(4, 1);
    ds.y << 1, 1, 1, 0;
    ds.y_hat << 0, 1, 0, 1;
    ds.probs.col(0) << 0.8, 0.6, 0.2, 0.5;
    ds.group_ids = {"1"};
    ds.true_labels = {"1", "1", "0", "1"};
    return validate_dataset(std::move(ds));
}

inline const char* d4_csv() {
    return "y,y_hat,prob_1,true_group\n"
           "1,0,0.8,1\n"
           "1,1,0.6,1\n"
           "1,0,0.2,0\n"
           "0,1,0.5,1\n";
}

/// Random labeled single-probability-column dataset for fuzz suites.
inline AuditDataset random_labeled_dataset(RngStream& rng, Index n) {
    AuditDataset ds;
    ds.y.resize(n);
    ds.y_hat.resize(n);
    ds.probs.resize(n, 1);
    ds.true_labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        ds.y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        ds.y_hat[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        ds.probs(i, 0) = rng.uniform();
        ds.true_labels[static_cast<std::size_t>(i)] =
            rng.bernoulli(0.5) ? "1" : "0";
    }
    ds.group_ids = {"1"};
    return validate_dataset(std::move(ds));
}

/// Plain-loop re-summation of a Definition-style ratio, kept free of Eigen
/// expressions so it exercises an independent arithmetic path.
struct BruteRatio {
    double num = 0.0;
    double den = 0.0;
    double value() const { return num / den; }
};

template <typename Weight, typename H1, typename H2>
inline BruteRatio brute_ratio(const AuditDataset& ds, Weight w, H1 h1, H2 h2) {
    BruteRatio r;
    for (Index i = 0; i < ds.n(); ++i) {
        const double a = h1(ds.y[i], ds.y_hat[i]);
        const double b = h2(ds.y[i], ds.y_hat[i]);
        r.num += w(i) * a * b;
        r.den += w(i) * a;
    }
    return r;
}

/// Truth-table (h1, h2) pairs written out independently of metric_spec.
struct HandMetric {
    const char* name;
    double (*h1)(double, double);
    double (*h2)(double, double);
    MetricKind kind;
};

inline const std::vector<HandMetric>& hand_metrics() {
    static const std::vector<HandMetric> table = {
        {"fnr", [](double y, double) { return y; },
         [](double, double yh) { return 1.0 - yh; }, MetricKind::FNR},
        {"fpr", [](double y, double) { return 1.0 - y; },
         [](double, double yh) { return yh; }, MetricKind::FPR},
        {"ppv", [](double, double yh) { return yh; },
         [](double y, double) { return y; }, MetricKind::PPV},
        {"npv", [](double, double yh) { return 1.0 - yh; },
         [](double y, double) { return 1.0 - y; }, MetricKind::NPV},
        {"selection_rate", [](double, double) { return 1.0; },
         [](double, double yh) { return yh; }, MetricKind::SelectionRate},
        {"error_rate", [](double, double) { return 1.0; },
         [](double y, double yh) { return y != yh ? 1.0 : 0.0; },
         MetricKind::ErrorRate},
    };
    return table;
}

} // namespace weq::test
