#pragma once

#include "weq/dataset.hpp"
#include "weq/logistic.hpp"
#include "weq/metrics.hpp"
#include "weq/rng.hpp"
#include "weq/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace weq {

/// How the binary group label is realized from the true membership
/// probability expit(Q1).
enum class GroupAssignment { Bernoulli, Threshold };

struct SimConfig {
    Scalar beta1 = 0.25;  // conditional dependence of the outcome on the group
    Scalar beta2 = 0.0;   // mean shift of the estimated group probabilities
    Scalar beta3 = 20.0;  // covariance between true and estimated scores, [0,20]
    Index n_population = 50000;
    Index n_sample = 2000;
    Index n_train = 0;    // 0: half the population
    Scalar threshold = 0.5;
    std::uint64_t seed = 42;
    int replications = 100;
    GroupAssignment assignment = GroupAssignment::Bernoulli;

    Index resolved_n_train() const {
        return n_train > 0 ? n_train : n_population / 2;
    }
};

/// One synthetic population: covariates, group labels, true and estimated
/// membership probabilities, outcomes, and model scores. The first
/// resolved_n_train() rows are the training split.
struct SimPopulation {
    SimConfig config;
    Vec z;
    Mat x;        // n x 3
    Vec q1, q2;
    Vec p_true;   // expit(q1)
    Vec pi;       // expit(q2)
    Vec a;        // group label, 0/1
    Vec p_y;
    Vec y;
    Vec score;    // fitted predictor output
    Vec y_hat;    // I(score > threshold)
    LogisticModel model;

    Index n() const { return z.size(); }
};

/// Draws a population from the generating process, fits the outcome
/// predictor on the training split, and scores every record.
SimPopulation generate_population(const SimConfig& config);
SimPopulation generate_population(const SimConfig& config, RngStream stream);

/// IRLS logistic fit of the outcome on (Z, X1, X2, X3) over rows
/// [0, n_train) of the population.
LogisticModel train_predictor(const SimPopulation& pop, Index n_train);

/// Mann-Whitney AUC of `scores` against binary `labels`; ties count 1/2.
Scalar group_auc(const Vec& scores, const Vec& labels);

/// Test-sample row indices: a without-replacement draw from the rows after
/// the training split.
std::vector<Index> draw_test_sample(const SimPopulation& pop, Index n_sample,
                                    RngStream stream);

/// View of selected rows as an audit dataset with exhaustive groups
/// {"1", "0"}: prob_1 = pi, prob_0 = 1 - pi, true_group = A.
AuditDataset to_audit_dataset(const SimPopulation& pop,
                              const std::vector<Index>& rows);

enum class SweepAxis { Beta1, Beta2, Beta3, NSample };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

/// One sweep observation (or summary row when rep < 0).
struct SweepRow {
    Scalar value = 0.0;  // axis value
    int rep = -1;
    std::string group;
    Scalar weighted = 0.0, oracle = 0.0, bias = 0.0, abs_bias = 0.0;
    Scalar eps = 0.0, eps_prime = 0.0, delta = 0.0, delta_star = 0.0;
    Scalar bound_assumption = 0.0, same_sign = 0.0; // 0/1 flags; fractions in summaries
    Scalar bound = 0.0, pi_mass_ratio = 0.0;
    bool summary = false;
    std::string stat; // "mean", "p025", "p975" on summary rows
};

struct SweepTable {
    SweepAxis axis = SweepAxis::Beta1;
    MetricKind metric = MetricKind::FNR;
    std::vector<SweepRow> rows;
};

/// Scenario sweep: for each axis value and replication, draw a population,
/// train, sample a test set, and record weighted/oracle estimates with the
/// full bias decomposition for both groups. Replication (cell, rep) uses
/// pre-assigned substreams, so the table is identical for any thread count.
/// On the NSample axis the population stream depends only on rep, so all
/// sample sizes see the same populations.
SweepTable run_scenario_sweep(const SimConfig& base, SweepAxis axis,
                              const std::vector<Scalar>& values, int reps,
                              MetricKind metric = MetricKind::FNR,
                              unsigned threads = 0);

/// CSV table; summary rows carry summary=1 and a stat label.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

} // namespace weq
