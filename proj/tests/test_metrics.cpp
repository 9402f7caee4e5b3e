#include "support/fixtures.hpp"
#include "weq/errors.hpp"
#include "weq/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace weq;

TEST_CASE("metric_spec matches the hand truth table on all four cells") {
    for (const auto& hm : test::hand_metrics()) {
        const MetricSpec spec = metric_spec(hm.kind);
        for (double y : {0.0, 1.0}) {
            for (double yh : {0.0, 1.0}) {
                CHECK(eval_cell(spec.h1, y, yh) == hm.h1(y, yh));
                CHECK(eval_cell(spec.h2, y, yh) == hm.h2(y, yh));
            }
        }
    }
    CHECK_THROWS_AS(parse_metric_kind("auc"), UndefinedMetricError);
    CHECK(parse_metric_kind("FNR") == MetricKind::FNR);
    CHECK(parse_metric_kind("Selection_Rate") == MetricKind::SelectionRate);
}

TEST_CASE("d4 point values") {
    const AuditDataset ds = test::d4();
    const MetricSpec fnr = metric_spec(MetricKind::FNR);
    const MetricSpec sel = metric_spec(MetricKind::SelectionRate);

    CHECK(weighted_metric(ds, fnr, "1").value ==
          doctest::Approx(0.625).epsilon(1e-12));
    CHECK(oracle_metric(ds, fnr, "1").value ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(marginal_metric(ds, fnr).value ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(weighted_metric(ds, sel, "1").value ==
          doctest::Approx(1.1 / 2.1).epsilon(1e-12));
    CHECK(marginal_metric(ds, sel).value ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("weighted equals oracle when probabilities are indicators") {
    RngStream rng(31);
    for (int t = 0; t < 20; ++t) {
        AuditDataset ds = test::random_labeled_dataset(rng, 40);
        ds.probs.col(0) = ds.group_indicator("1").matrix();
        for (const auto& hm : test::hand_metrics()) {
            const MetricSpec spec = metric_spec(hm.kind);
            const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
            if ((ds.group_indicator("1") * h1).sum() <= 0.0) continue;
            CHECK(weighted_metric(ds, spec, "1").value ==
                  doctest::Approx(oracle_metric(ds, spec, "1").value)
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("estimates stay in [0,1] and match the brute-force oracle") {
    RngStream rng(77);
    for (int t = 0; t < 50; ++t) {
        const AuditDataset ds = test::random_labeled_dataset(rng, 30);
        const Vec pi = ds.group_probs("1");
        for (const auto& hm : test::hand_metrics()) {
            const MetricSpec spec = metric_spec(hm.kind);
            const auto brute = test::brute_ratio(
                ds, [&](Index i) { return pi[i]; }, hm.h1, hm.h2);
            if (brute.den <= 0.0) continue;
            const MetricEstimate est = weighted_metric(ds, spec, "1");
            CHECK(est.value >= 0.0);
            CHECK(est.value <= 1.0);
            CHECK(est.value == doctest::Approx(brute.value()).epsilon(1e-12));
            CHECK(est.numerator_mass ==
                  doctest::Approx(brute.num).epsilon(1e-12));
        }
    }
}

TEST_CASE("permutation invariance") {
    RngStream rng(5150);
    const AuditDataset ds = test::random_labeled_dataset(rng, 64);
    std::vector<Index> perm(64);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1],
                  perm[static_cast<std::size_t>(rng.uniform_index(i))]);
    }
    const AuditDataset shuffled = ds.select_rows(perm);
    for (const auto& hm : test::hand_metrics()) {
        const MetricSpec spec = metric_spec(hm.kind);
        CHECK(weighted_metric(ds, spec, "1").value ==
              doctest::Approx(weighted_metric(shuffled, spec, "1").value)
                  .epsilon(1e-12));
        CHECK(oracle_metric(ds, spec, "1").value ==
              doctest::Approx(oracle_metric(shuffled, spec, "1").value)
                  .epsilon(1e-12));
        CHECK(marginal_metric(ds, spec).value ==
              doctest::Approx(marginal_metric(shuffled, spec).value)
                  .epsilon(1e-12));
    }
}

TEST_CASE("oracle FNR complement identity") {
    RngStream rng(99);
    for (int t = 0; t < 20; ++t) {
        const AuditDataset ds = test::random_labeled_dataset(rng, 50);
        const Vec ind = ds.group_indicator("1");
        const double positives = (ind * ds.y).sum();
        if (positives <= 0.0) continue;
        const double tp_mass = (ind * ds.y * ds.y_hat).sum();
        const double fnr =
            oracle_metric(ds, metric_spec(MetricKind::FNR), "1").value;
        CHECK(fnr + tp_mass / positives == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("degenerate cells raise undefined-metric errors") {
    AuditDataset ds;
    ds.y.resize(2);
    ds.y << 0, 0; // no positives anywhere
    ds.y_hat.resize(2);
    ds.y_hat << 0, 1;
    ds.probs.resize(2, 1);
    ds.probs.col(0) << 0.5, 0.5;
    ds.group_ids = {"1"};
    ds.true_labels = {"1", "0"};
    ds = validate_dataset(std::move(ds));

    const MetricSpec fnr = metric_spec(MetricKind::FNR);
    CHECK_THROWS_AS(oracle_metric(ds, fnr, "1"), UndefinedMetricError);
    CHECK_THROWS_AS(weighted_metric(ds, fnr, "1"), UndefinedMetricError);
    // FPR is fine: one true negative in the group.
    CHECK_NOTHROW(oracle_metric(ds, metric_spec(MetricKind::FPR), "1"));
}

TEST_CASE("single true positive with no false negatives gives FNR zero") {
    AuditDataset ds;
    ds.y.resize(2);
    ds.y << 1, 0;
    ds.y_hat.resize(2);
    ds.y_hat << 1, 0;
    ds.probs.resize(2, 1);
    ds.probs.col(0) << 0.9, 0.3;
    ds.group_ids = {"1"};
    ds.true_labels = {"1", "0"};
    ds = validate_dataset(std::move(ds));
    CHECK(oracle_metric(ds, metric_spec(MetricKind::FNR), "1").value == 0.0);
}

TEST_CASE("perfect predictions give zero error rate") {
    AuditDataset ds;
    ds.y.resize(3);
    ds.y << 1, 0, 1;
    ds.y_hat = ds.y;
    ds.probs.resize(3, 1);
    ds.probs.col(0) << 0.2, 0.9, 0.7;
    ds.group_ids = {"1"};
    ds = validate_dataset(std::move(ds));
    CHECK(marginal_metric(ds, metric_spec(MetricKind::ErrorRate)).value == 0.0);
    CHECK(weighted_metric(ds, metric_spec(MetricKind::ErrorRate), "1").value ==
          0.0);
}
