#include "weq/simulate.hpp"

#include "weq/bias.hpp"
#include "weq/errors.hpp"
#include "weq/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace weq {

namespace {

constexpr Scalar kQVariance = 20.0;

void check_config(const SimConfig& c) {
    if (c.beta3 < 0.0 || c.beta3 > kQVariance) {
        throw ValidationError(
            "beta3 must lie in [0,20]: the (Q1,Q2) covariance matrix is not "
            "positive semi-definite beyond 20");
    }
    if (c.n_population < 2) throw ValidationError("n_population must be >= 2");
    const Index n_train = c.resolved_n_train();
    if (n_train < 1 || n_train >= c.n_population) {
        throw ValidationError("n_train must lie in [1, n_population)");
    }
    if (c.n_sample < 1 || c.n_sample > c.n_population - n_train) {
        throw ValidationError(
            "n_sample must fit in the population after the training split");
    }
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
        throw ValidationError("threshold must lie in [0,1]");
    }
}

} // namespace

SimPopulation generate_population(const SimConfig& config) {
    return generate_population(config,
                               RngStream::derive(config.seed, {0x51A0u}));
}

SimPopulation generate_population(const SimConfig& config, RngStream stream) {
    check_config(config);
    const Index n = config.n_population;

    SimPopulation pop;
    pop.config = config;
    pop.z.resize(n);
    pop.x.resize(n, 3);
    pop.q1.resize(n);
    pop.q2.resize(n);
    pop.p_true.resize(n);
    pop.pi.resize(n);
    pop.a.resize(n);
    pop.p_y.resize(n);
    pop.y.resize(n);

    // Cholesky factor of [[20, b3], [b3, 20]]; the residual variance is
    // clamped so beta3 = 20 (a rank-one matrix) does not round negative.
    const Scalar l11 = std::sqrt(kQVariance);
    const Scalar l21 = config.beta3 / l11;
    const Scalar l22 = std::sqrt(std::max(0.0, kQVariance - l21 * l21));
    const Scalar x_sd = std::sqrt(0.5);

    for (Index i = 0; i < n; ++i) {
        const Scalar z = stream.normal(-0.4, 1.0);
        const Scalar x1 = stream.normal(0.0, x_sd);
        const Scalar x2 = stream.normal(1.0, x_sd);
        const Scalar x3 = stream.normal(-1.0, x_sd);
        const Scalar u1 = stream.normal();
        const Scalar u2 = stream.normal();
        const Scalar q1 = z + l11 * u1;
        const Scalar q2 = z + config.beta2 + l21 * u1 + l22 * u2;
        const Scalar p_true = expit(q1);
        Scalar a;
        if (config.assignment == GroupAssignment::Bernoulli) {
            a = stream.bernoulli(p_true) ? 1.0 : 0.0;
        } else {
            a = (p_true > 0.5) ? 1.0 : 0.0;
        }
        const Scalar p_y =
            expit(-0.2 + z + x1 + x2 + x3 + config.beta1 * a);

        pop.z[i] = z;
        pop.x(i, 0) = x1;
        pop.x(i, 1) = x2;
        pop.x(i, 2) = x3;
        pop.q1[i] = q1;
        pop.q2[i] = q2;
        pop.p_true[i] = p_true;
        pop.pi[i] = expit(q2);
        pop.a[i] = a;
        pop.p_y[i] = p_y;
        pop.y[i] = stream.bernoulli(p_y) ? 1.0 : 0.0;
    }

    pop.model = train_predictor(pop, config.resolved_n_train());
    Mat design(n, 4);
    design.col(0) = pop.z.matrix();
    design.rightCols(3) = pop.x;
    pop.score = pop.model.predict(design);
    pop.y_hat = dichotomize(pop.score, config.threshold);
    return pop;
}

LogisticModel train_predictor(const SimPopulation& pop, Index n_train) {
    if (n_train < 1 || n_train > pop.n()) {
        throw ValidationError("invalid training split size");
    }
    Mat design(n_train, 4);
    design.col(0) = pop.z.head(n_train).matrix();
    design.rightCols(3) = pop.x.topRows(n_train);
    return fit_logistic(design, pop.y.head(n_train));
}

Scalar group_auc(const Vec& scores, const Vec& labels) {
    const Index n = scores.size();
    if (n != labels.size() || n == 0) {
        throw ValidationError("group_auc: size mismatch or empty input");
    }
    const Scalar n1 = labels.sum();
    const Scalar n0 = static_cast<Scalar>(n) - n1;
    if (n1 == 0.0 || n0 == 0.0) {
        throw UndefinedMetricError(
            "group_auc: both classes must be present");
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] < scores[b]; });

    // Average ranks over tie runs, then the rank-sum form of Mann-Whitney.
    Scalar rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const Scalar avg_rank = 0.5 * static_cast<Scalar>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1.0) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    return (rank_sum_pos - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

std::vector<Index> draw_test_sample(const SimPopulation& pop, Index n_sample,
                                    RngStream stream) {
    const Index n_train = pop.config.resolved_n_train();
    const Index pool = pop.n() - n_train;
    if (n_sample > pool) {
        throw ValidationError("test sample larger than the held-out pool");
    }
    std::vector<Index> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), n_train);
    // Partial Fisher-Yates: the first n_sample slots become the draw.
    for (Index i = 0; i < n_sample; ++i) {
        const auto j = i + static_cast<Index>(stream.uniform_index(
                               static_cast<std::uint64_t>(pool - i)));
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(n_sample));
    return idx;
}

AuditDataset to_audit_dataset(const SimPopulation& pop,
                              const std::vector<Index>& rows) {
    const Index m = static_cast<Index>(rows.size());
    AuditDataset ds;
    ds.y.resize(m);
    ds.y_hat.resize(m);
    ds.score.emplace(m);
    ds.probs.resize(m, 2);
    ds.group_ids = {"1", "0"};
    ds.true_labels.resize(static_cast<std::size_t>(m));
    ds.exhaustive = true;
    for (Index i = 0; i < m; ++i) {
        const Index j = rows[static_cast<std::size_t>(i)];
        ds.y[i] = pop.y[j];
        ds.y_hat[i] = pop.y_hat[j];
        (*ds.score)[i] = pop.score[j];
        ds.probs(i, 0) = pop.pi[j];
        ds.probs(i, 1) = 1.0 - pop.pi[j];
        ds.true_labels[static_cast<std::size_t>(i)] =
            pop.a[j] == 1.0 ? "1" : "0";
    }
    return ds;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "beta1") return SweepAxis::Beta1;
    if (name == "beta2") return SweepAxis::Beta2;
    if (name == "beta3") return SweepAxis::Beta3;
    if (name == "n_sample") return SweepAxis::NSample;
    throw ValidationError("unknown sweep axis '" + name +
                          "' (expected beta1, beta2, beta3, n_sample)");
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Beta1: return "beta1";
        case SweepAxis::Beta2: return "beta2";
        case SweepAxis::Beta3: return "beta3";
        case SweepAxis::NSample: return "n_sample";
    }
    return "?";
}

namespace {

SimConfig apply_axis(SimConfig cfg, SweepAxis axis, Scalar value) {
    switch (axis) {
        case SweepAxis::Beta1: cfg.beta1 = value; break;
        case SweepAxis::Beta2: cfg.beta2 = value; break;
        case SweepAxis::Beta3: cfg.beta3 = value; break;
        case SweepAxis::NSample: cfg.n_sample = static_cast<Index>(value); break;
    }
    return cfg;
}

SweepRow observe(const AuditDataset& ds, const MetricSpec& spec,
                 const std::string& group) {
    SweepRow row;
    row.group = group;
    row.weighted = weighted_metric(ds, spec, group).value;
    row.oracle = oracle_metric(ds, spec, group).value;
    row.bias = row.weighted - row.oracle;
    row.abs_bias = std::abs(row.bias);
    const EpsilonPair e = epsilon_sample(ds, spec, group);
    row.eps = e.eps;
    row.eps_prime = e.eps_prime;
    const DeltaPair d = deltas(ds, spec, group);
    row.delta = d.delta;
    row.delta_star = d.delta_star;
    row.bound_assumption = bound_assumption_check(d) ? 1.0 : 0.0;
    row.same_sign = same_sign_condition(e) ? 1.0 : 0.0;
    row.pi_mass_ratio = pi_mass_ratio_sample(ds, spec, group);
    row.bound = bias_bound(row.weighted, row.pi_mass_ratio);
    return row;
}

} // namespace

SweepTable run_scenario_sweep(const SimConfig& base, SweepAxis axis,
                              const std::vector<Scalar>& values, int reps,
                              MetricKind metric, unsigned threads) {
    if (values.empty()) throw ValidationError("sweep axis has no values");
    if (reps < 1) throw ValidationError("sweep needs at least 1 replication");
    const MetricSpec spec = metric_spec(metric);
    const std::vector<std::string> groups = {"1", "0"};

    SweepTable table;
    table.axis = axis;
    table.metric = metric;

    const Index n_cells = static_cast<Index>(values.size());
    const Index n_jobs = n_cells * reps;
    std::vector<std::array<SweepRow, 2>> slots(
        static_cast<std::size_t>(n_jobs));

    parallel_for(
        n_jobs,
        [&](Index job) {
            const Index cell = job / reps;
            const int rep = static_cast<int>(job % reps);
            const Scalar value = values[static_cast<std::size_t>(cell)];
            const SimConfig cfg = apply_axis(base, axis, value);
            // Share populations across sample sizes; resample only the test
            // draw there.
            RngStream pop_stream =
                axis == SweepAxis::NSample
                    ? RngStream::derive(base.seed,
                                        {0x90Bu, static_cast<std::uint64_t>(rep)})
                    : RngStream::derive(base.seed,
                                        {0x90Bu, static_cast<std::uint64_t>(cell),
                                         static_cast<std::uint64_t>(rep)});
            RngStream sample_stream = RngStream::derive(
                base.seed, {0x7E57u, static_cast<std::uint64_t>(cell),
                            static_cast<std::uint64_t>(rep)});
            const SimPopulation pop = generate_population(cfg, pop_stream);
            const auto test_rows =
                draw_test_sample(pop, cfg.n_sample, sample_stream);
            const AuditDataset ds = to_audit_dataset(pop, test_rows);
            for (std::size_t g = 0; g < groups.size(); ++g) {
                SweepRow row = observe(ds, spec, groups[g]);
                row.value = value;
                row.rep = rep;
                slots[static_cast<std::size_t>(job)][g] = std::move(row);
            }
        },
        threads);

    for (const auto& pair : slots) {
        table.rows.push_back(pair[0]);
        table.rows.push_back(pair[1]);
    }

    // Per-cell, per-group summaries across replications.
    struct Field {
        const char* stat;
        Scalar p;
    };
    const Field stats[] = {{"mean", -1.0}, {"p025", 0.025}, {"p975", 0.975}};
    for (Index cell = 0; cell < n_cells; ++cell) {
        for (const auto& group : groups) {
            std::vector<const SweepRow*> cell_rows;
            for (Index r = 0; r < reps; ++r) {
                const auto& pair =
                    slots[static_cast<std::size_t>(cell * reps + r)];
                cell_rows.push_back(group == "1" ? &pair[0] : &pair[1]);
            }
            for (const auto& st : stats) {
                auto reduce = [&](auto field) {
                    std::vector<Scalar> vals;
                    vals.reserve(cell_rows.size());
                    for (const auto* r : cell_rows) vals.push_back(field(*r));
                    return st.p < 0.0 ? mean_of(vals) : percentile(vals, st.p);
                };
                SweepRow s;
                s.value = values[static_cast<std::size_t>(cell)];
                s.rep = -1;
                s.group = group;
                s.summary = true;
                s.stat = st.stat;
                s.weighted = reduce([](const SweepRow& r) { return r.weighted; });
                s.oracle = reduce([](const SweepRow& r) { return r.oracle; });
                s.bias = reduce([](const SweepRow& r) { return r.bias; });
                s.abs_bias = reduce([](const SweepRow& r) { return r.abs_bias; });
                s.eps = reduce([](const SweepRow& r) { return r.eps; });
                s.eps_prime =
                    reduce([](const SweepRow& r) { return r.eps_prime; });
                s.delta = reduce([](const SweepRow& r) { return r.delta; });
                s.delta_star =
                    reduce([](const SweepRow& r) { return r.delta_star; });
                s.bound_assumption =
                    reduce([](const SweepRow& r) { return r.bound_assumption; });
                s.same_sign =
                    reduce([](const SweepRow& r) { return r.same_sign; });
                s.bound = reduce([](const SweepRow& r) { return r.bound; });
                s.pi_mass_ratio =
                    reduce([](const SweepRow& r) { return r.pi_mass_ratio; });
                table.rows.push_back(std::move(s));
            }
        }
    }
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "axis,value,rep,group,metric,weighted,oracle,bias,abs_bias,eps,"
           "eps_prime,delta,delta_star,bound_assumption,same_sign,bound,"
           "pi_mass_ratio,summary,stat\n";
    const std::string axis = sweep_axis_name(table.axis);
    const std::string metric = metric_name(table.metric);
    for (const auto& r : table.rows) {
        out << axis << ',' << format_double(r.value) << ',' << r.rep << ','
            << r.group << ',' << metric << ',' << format_double(r.weighted)
            << ',' << format_double(r.oracle) << ',' << format_double(r.bias)
            << ',' << format_double(r.abs_bias) << ',' << format_double(r.eps)
            << ',' << format_double(r.eps_prime) << ','
            << format_double(r.delta) << ',' << format_double(r.delta_star)
            << ',' << format_double(r.bound_assumption) << ','
            << format_double(r.same_sign) << ',' << format_double(r.bound)
            << ',' << format_double(r.pi_mass_ratio) << ','
            << (r.summary ? 1 : 0) << ',' << r.stat << "\n";
    }
}

} // namespace weq
