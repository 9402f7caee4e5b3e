// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
// Every tolerance is pinned here; nothing is deferred to calibration.

#include "support/fixtures.hpp"
#include "weq/bias.hpp"
#include "weq/numeric.hpp"
#include "weq/sensitivity.hpp"
#include "weq/simulate.hpp"
#include "weq/utility.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

using namespace weq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Shared fuzz corpus for criteria 1, 6, and 8.
std::vector<AuditDataset> fuzz_corpus() {
    std::vector<AuditDataset> out;
    out.reserve(1000);
    RngStream rng(20240817);
    for (int t = 0; t < 1000; ++t) {
        const Index n = 10 + static_cast<Index>(rng.uniform_index(491));
        out.push_back(test::random_labeled_dataset(rng, n));
    }
    return out;
}

bool cells_feasible(const AuditDataset& ds, const MetricSpec& spec) {
    const Vec h1 = cell_values(spec.h1, ds.y, ds.y_hat);
    const Vec h2 = cell_values(spec.h2, ds.y, ds.y_hat);
    const Vec ind = ds.group_indicator("1");
    return (ind * h1).sum() > 0.0 && (h1 * h2).sum() > 0.0 &&
           (h1 * (1.0 - h2)).sum() > 0.0 && (ds.group_probs("1") * h1).sum() > 0.0;
}

// --------------------------------------------------------------------------

Outcome criterion1_identities(const std::vector<AuditDataset>& corpus) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    long checked = 0;
    double worst = 0.0;
    for (const auto& ds : corpus) {
        for (const auto& hm : test::hand_metrics()) {
            const MetricSpec spec = metric_spec(hm.kind);
            if (!cells_feasible(ds, spec)) continue;
            const double bias = empirical_bias(ds, spec, "1");
            const double nu_w = weighted_metric(ds, spec, "1").value;
            const double nu = marginal_metric(ds, spec).value;
            const EpsilonPair e = epsilon_sample(ds, spec, "1");
            const DeltaPair d = deltas(ds, spec, "1");
            const double base = sample_base_rate(ds, spec, "1");
            const double h1r = sample_h1_rate(ds, spec);
            const double plug = bias_estimate({nu_w, nu, base, h1r}, e);
            const double decomp =
                (d.delta + nu_w * d.delta_star) / (base * h1r);
            worst = std::max({worst, std::abs(plug - bias),
                              std::abs(decomp - bias)});
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    out.require(worst <= 1e-10, "max identity deviation " + fmt(worst));
    out.require(checked > 4000, "only " + std::to_string(checked) + " cases");
    out.require(secs < 60.0, "runtime " + fmt(secs) + "s >= 60s");
    out.detail = std::to_string(checked) + " metric/dataset cases, max dev " +
                 fmt(worst) + ", " + fmt(secs) + "s";
    return out;
}

Outcome criterion2_golden_chain() {
    Outcome out;
    const AuditDataset ds = test::d4();
    const MetricSpec fnr = metric_spec(MetricKind::FNR);
    auto near = [&](double got, double want, const char* what) {
        out.require(std::abs(got - want) <= 1e-12,
                    std::string(what) + " = " + fmt(got));
    };
    near(weighted_metric(ds, fnr, "1").value, 0.625, "weighted");
    near(oracle_metric(ds, fnr, "1").value, 0.5, "oracle");
    near(empirical_bias(ds, fnr, "1"), 0.125, "bias");
    const EpsilonPair e = epsilon_sample(ds, fnr, "1");
    near(e.eps, 0.0, "eps");
    near(e.eps_prime, -0.4, "eps_prime");
    const EpsilonBounds b = epsilon_bounds(ds, fnr, "1");
    near(b.eps.lo, -0.5, "eps bound lo");
    near(b.eps.hi, 0.5, "eps bound hi");
    near(b.eps_prime.lo, -0.4, "eps' bound lo");
    near(b.eps_prime.hi, 0.6, "eps' bound hi");
    const DeltaPair d = deltas(ds, fnr, "1");
    near(d.delta, 0.0, "delta");
    near(d.delta_star, 0.1, "delta_star");
    out.require(bound_assumption_check(d), "assumption 1");
    near(bias_bound(0.625, pi_mass_ratio_sample(ds, fnr, "1")), 0.325, "bound");
    out.detail = "weighted 0.625, oracle 0.5, bias 0.125, bound 0.325";
    return out;
}

Outcome criterion3_dgp_calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    SimConfig cfg; // defaults: beta3 = 20, seed 42, Bernoulli assignment
    cfg.n_population = 50000;
    const SimPopulation perfect = generate_population(cfg);
    const double share = perfect.a.mean();
    const double auc_hi = group_auc(perfect.pi, perfect.a);
    cfg.beta3 = 0.0;
    const SimPopulation indep = generate_population(cfg);
    const double auc_lo = group_auc(indep.pi, indep.a);
    const double secs = seconds_since(t0);

    out.require(std::abs(share - 0.47) <= 0.01,
                "group share " + fmt(share) + " outside 0.47 +/- 0.01");
    out.require(auc_hi >= 0.99, "AUC at beta3=20 is " + fmt(auc_hi) +
                                    " < 0.99 (Bernoulli-realized labels cap "
                                    "this near 0.958)");
    out.require(std::abs(auc_lo - 0.50) <= 0.02,
                "AUC at beta3=0 is " + fmt(auc_lo) + " outside 0.50 +/- 0.02");
    out.require(secs < 30.0, "runtime " + fmt(secs) + "s >= 30s");
    out.detail = "share " + fmt(share) + ", AUC(b3=20) " + fmt(auc_hi) +
                 ", AUC(b3=0) " + fmt(auc_lo) + ", " + fmt(secs) + "s";
    return out;
}

struct CellStats {
    std::vector<double> weighted, bias, abs_bias, bound, delta, delta_star;
};

std::map<double, CellStats> collect_cells(const SweepTable& table,
                                          const std::string& group) {
    std::map<double, CellStats> cells;
    for (const auto& r : table.rows) {
        if (r.summary || r.group != group) continue;
        auto& c = cells[r.value];
        c.weighted.push_back(r.weighted);
        c.bias.push_back(r.bias);
        c.abs_bias.push_back(r.abs_bias);
        c.bound.push_back(r.bound);
        c.delta.push_back(r.delta);
        c.delta_star.push_back(r.delta_star);
    }
    return cells;
}

double abs_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s / static_cast<double>(v.size());
}

Outcome criterion4_sampling_vs_bias() {
    Outcome out;
    const SimConfig base; // beta1 = 0.25 defaults, seed 42
    const int reps = 100;

    const SweepTable t_n = run_scenario_sweep(
        base, SweepAxis::NSample, {1000, 2000, 5000, 10000}, reps);
    auto cells = collect_cells(t_n, "1");
    double prev_width = std::numeric_limits<double>::infinity();
    std::vector<double> mean_biases;
    std::string widths;
    for (auto& [value, c] : cells) {
        const double width =
            percentile(c.weighted, 0.975) - percentile(c.weighted, 0.025);
        out.require(width < prev_width,
                    "interval width not strictly decreasing at n_sample = " +
                        fmt(value));
        prev_width = width;
        mean_biases.push_back(mean_of(c.bias));
        widths += (widths.empty() ? "" : "/") + fmt(width);
    }
    const double spread =
        *std::max_element(mean_biases.begin(), mean_biases.end()) -
        *std::min_element(mean_biases.begin(), mean_biases.end());
    out.require(spread < 0.005, "mean bias varies by " + fmt(spread) +
                                    " across sample sizes");

    const SweepTable t_b = run_scenario_sweep(
        base, SweepAxis::Beta1, {0.0, 0.25, 0.5}, reps);
    auto bcells = collect_cells(t_b, "1");
    const double m0 = std::abs(mean_of(bcells[0.0].bias));
    const double m25 = std::abs(mean_of(bcells[0.25].bias));
    const double m50 = std::abs(mean_of(bcells[0.5].bias));
    out.require(m0 <= 0.005, "|mean bias| at beta1=0 is " + fmt(m0));
    out.require(m0 <= m25 && m25 <= m50,
                "|mean bias| not monotone: " + fmt(m0) + ", " + fmt(m25) +
                    ", " + fmt(m50));
    out.detail = "widths " + widths + ", bias spread " + fmt(spread) +
                 ", |mean bias| " + fmt(m0) + " <= " + fmt(m25) + " <= " +
                 fmt(m50);
    return out;
}

Outcome criterion5_bound_containment() {
    Outcome out;
    const SimConfig base;
    const int reps = 100;
    const struct {
        SweepAxis axis;
        std::vector<double> values;
        bool beta2;
    } sweeps[] = {
        {SweepAxis::Beta1, {-0.5, -0.25, 0.0, 0.25, 0.5}, false},
        {SweepAxis::Beta2, {-0.5, -0.25, 0.0, 0.25, 0.5}, true},
        {SweepAxis::Beta3, {0.0, 5.0, 10.0, 15.0, 20.0}, false},
    };
    int cells_checked = 0, off_axis_violations = 0;
    std::string violation_note;
    for (const auto& sweep : sweeps) {
        const SweepTable t =
            run_scenario_sweep(base, sweep.axis, sweep.values, reps);
        for (auto& [value, c] : collect_cells(t, "1")) {
            ++cells_checked;
            // Cell-level condition check, matching the replication-mean display.
            const bool a1 = abs_mean(c.delta) <= abs_mean(c.delta_star);
            if (!a1) {
                if (!sweep.beta2) ++off_axis_violations;
                violation_note += " violation@" + sweep_axis_name(sweep.axis) +
                           "=" + fmt(value);
                continue;
            }
            const double mean_abs_bias = mean_of(c.abs_bias);
            const double mean_bound = mean_of(c.bound);
            out.require(mean_bound >= mean_abs_bias,
                        "mean bound " + fmt(mean_bound) + " < mean |bias| " +
                            fmt(mean_abs_bias) + " at " +
                            sweep_axis_name(sweep.axis) + "=" + fmt(value));
        }
    }
    out.require(off_axis_violations == 0,
                "bound-condition violations off the beta2 axis:" + violation_note);
    out.detail = std::to_string(cells_checked) + " cells" +
                 (violation_note.empty() ? std::string(", no bound-condition violations")
                                  : violation_note);
    return out;
}

Outcome criterion6_same_sign_soundness(const std::vector<AuditDataset>& corpus) {
    Outcome out;
    long checked = 0, counterexamples = 0;
    for (const auto& ds : corpus) {
        for (const auto& hm : test::hand_metrics()) {
            const MetricSpec spec = metric_spec(hm.kind);
            if (!cells_feasible(ds, spec)) continue;
            const EpsilonPair e = epsilon_sample(ds, spec, "1");
            if (!same_sign_condition(e)) continue;
            ++checked;
            if (!bound_assumption_check(deltas(ds, spec, "1"))) ++counterexamples;
        }
    }
    out.require(counterexamples == 0,
                std::to_string(counterexamples) + " counterexamples");
    out.require(checked > 500, "only " + std::to_string(checked) +
                                   " same-sign cases seen");
    out.detail = std::to_string(checked) + " same-sign cases, " +
                 std::to_string(counterexamples) + " counterexamples";
    return out;
}

Outcome criterion7_coverage() {
    Outcome out;
    const int runs = 200;
    const MetricSpec fnr = metric_spec(MetricKind::FNR);
    std::vector<int> covered(runs, 0);
    std::atomic<int> failures{0};
    parallel_for(runs, [&](Index r) {
        SimConfig cfg; // defaults, n_sample 2000
        SimPopulation pop = generate_population(
            cfg, RngStream::derive(cfg.seed,
                                   {0xC0Fu, static_cast<std::uint64_t>(r)}));
        std::vector<Index> all(static_cast<std::size_t>(pop.n()));
        for (Index i = 0; i < pop.n(); ++i) all[static_cast<std::size_t>(i)] = i;
        const AuditDataset popds = to_audit_dataset(pop, all);
        const EpsilonPair truth = epsilon_sample(popds, fnr, "1");
        const double oracle_fnr = oracle_metric(popds, fnr, "1").value;
        const double base_rate = sample_base_rate(popds, fnr, "1");

        const auto rows = draw_test_sample(
            pop, cfg.n_sample,
            RngStream::derive(cfg.seed, {0xD1Eu, static_cast<std::uint64_t>(r)}));
        const AuditDataset ds = to_audit_dataset(pop, rows);
        SensitivityConfig sc;
        sc.eps_range =
            RangeSpec::absolute(truth.eps - 0.01, truth.eps + 0.01);
        sc.eps_prime_range = RangeSpec::absolute(truth.eps_prime - 0.01,
                                                 truth.eps_prime + 0.01);
        sc.base_rate = base_rate;
        sc.bootstrap_reps = 1000;
        sc.alpha = 0.05;
        sc.seed = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(r)));
        try {
            const SensitivityResult res = run_sensitivity(ds, fnr, "1", sc);
            if (res.sensitivity_interval.contains(oracle_fnr)) {
                covered[static_cast<std::size_t>(r)] = 1;
            }
        } catch (...) {
            failures.fetch_add(1);
        }
    });
    int total = 0;
    for (int c : covered) total += c;
    out.require(failures.load() == 0,
                std::to_string(failures.load()) + " runs failed outright");
    out.require(total >= 180, "coverage " + std::to_string(total) + "/200");
    out.detail = "oracle FNR covered in " + std::to_string(total) +
                 "/200 runs (need >= 180)";
    return out;
}

Outcome criterion8_corner_sufficiency(const std::vector<AuditDataset>& corpus) {
    Outcome out;
    long cases = 0, mismatches = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const AuditDataset& ds = corpus[i];
        for (const auto& hm : test::hand_metrics()) {
            const MetricSpec spec = metric_spec(hm.kind);
            if (!cells_feasible(ds, spec)) continue;
            const EpsilonBounds b = epsilon_bounds(ds, spec, "1");
            SensitivityConfig c;
            c.eps_range = RangeSpec::absolute(b.eps.lo * 0.75, b.eps.hi * 0.75);
            c.eps_prime_range = RangeSpec::absolute(b.eps_prime.lo * 0.75,
                                                    b.eps_prime.hi * 0.75);
            c.base_rate = 0.5;
            c.bootstrap_reps = 1;
            c.resample = false;
            c.grid_resolution = 5;
            const SensitivityResult r = run_sensitivity(ds, spec, "1", c);
            const auto rows = contour_grid(ds, spec, "1", c);
            double lo = rows.front().corrected, hi = rows.front().corrected;
            for (const auto& row : rows) {
                lo = std::min(lo, row.corrected);
                hi = std::max(hi, row.corrected);
            }
            ++cases;
            // Exact float equality: the grid evaluates the same corners.
            if (lo != r.corners[2].corrected_full ||
                hi != r.corners[1].corrected_full) {
                ++mismatches;
            }
        }
    }
    out.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    out.detail = std::to_string(cases) + " grids, min/max exactly at the "
                 "opposed corners";
    return out;
}

Outcome criterion9_utility() {
    Outcome out;
    const double eu = expected_utility({0.8, 0.2, 0.1, 0.3, 0.0, 0.5});
    out.require(std::abs(eu - 0.50) <= 1e-12,
                "worked example EU = " + fmt(eu));

    RngStream rng(90210);
    int agree = 0;
    const int instances = 100;
    for (int t = 0; t < instances; ++t) {
        const Index n = 50;
        Vec scores(n), y(n);
        bool has0 = false, has1 = false;
        for (Index i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.uniform_index(101)) / 100.0;
            y[i] = rng.bernoulli(expit(4.0 * (scores[i] - 0.5))) ? 1.0 : 0.0;
            (y[i] == 1.0 ? has1 : has0) = true;
        }
        if (!has0) y[0] = 0.0;
        if (!has1) y[n - 1] = 1.0;
        const double r = 0.25 + 1.5 * rng.uniform();
        const double tau = select_threshold(scores, y, r);

        // Exhaustive grid oracle at 1e-4 resolution.
        const double n1 = y.sum();
        const double n0 = static_cast<double>(n) - n1;
        const double p1 = n1 / static_cast<double>(n);
        auto eu_at = [&](double t_) {
            double fp = 0.0, fn = 0.0;
            for (Index i = 0; i < n; ++i) {
                const bool pos = scores[i] > t_;
                if (pos && y[i] == 0.0) fp += 1.0;
                if (!pos && y[i] == 1.0) fn += 1.0;
            }
            return (1.0 - p1) * (1.0 - fp / n0) * r + p1 * (1.0 - fn / n1);
        };
        double best_grid_tau = 0.0, best_grid_eu = -1.0;
        for (double g = 0.0; g <= 1.0 + 1e-12; g += 1e-4) {
            const double v = eu_at(g);
            if (v > best_grid_eu) {
                best_grid_eu = v;
                best_grid_tau = g;
            }
        }
        // Same optimum: equal utility and an identical induced labeling
        // (the grid maximizer sits within one score gap of the midpoint).
        bool same = std::abs(eu_at(tau) - best_grid_eu) <= 1e-12;
        for (Index i = 0; i < n && same; ++i) {
            same = (scores[i] > tau) == (scores[i] > best_grid_tau);
        }
        if (same) ++agree;
    }
    out.require(agree == instances, std::to_string(instances - agree) +
                                        " instances disagree with the "
                                        "exhaustive oracle");
    out.detail = "worked example 0.5 exact; " + std::to_string(agree) + "/" +
                 std::to_string(instances) + " oracle agreements";
    return out;
}

Outcome criterion10_correlated_containment() {
    Outcome out;
    SimConfig cfg;
    cfg.n_population = 20000;
    cfg.n_sample = 2000;
    cfg.seed = 42;
    const SimPopulation pop = generate_population(cfg);
    const auto rows = draw_test_sample(pop, cfg.n_sample,
                                       RngStream::derive(cfg.seed, {0xACCu}));
    const AuditDataset ds = to_audit_dataset(pop, rows);

    GroupUtilityConfig ucfg;
    ucfg.groups = {"1", "0"};
    ucfg.prevalence = {{"1", 0.45}, {"0", 0.38}};
    ucfg.r = 0.8;
    ucfg.levels = {0.05, 0.10, 0.20};
    ucfg.bootstrap_reps = 200;
    ucfg.seed = 7;
    const GroupUtilityReport rep = group_utility_report(ds, ucfg);

    int checks = 0;
    for (const auto& g : rep.groups) {
        for (const auto& lvl : g.levels) {
            const struct {
                const Interval& wide;
                const Interval& narrow;
                const char* what;
            } pairs[] = {
                {lvl.correlated.fpr_plausible, lvl.uncorrelated.fpr_plausible,
                 "fpr plausible"},
                {lvl.correlated.fpr_sensitivity,
                 lvl.uncorrelated.fpr_sensitivity, "fpr sensitivity"},
                {lvl.correlated.fnr_plausible, lvl.uncorrelated.fnr_plausible,
                 "fnr plausible"},
                {lvl.correlated.fnr_sensitivity,
                 lvl.uncorrelated.fnr_sensitivity, "fnr sensitivity"},
                {lvl.correlated.eu_plausible, lvl.uncorrelated.eu_plausible,
                 "eu plausible"},
                {lvl.correlated.eu_sensitivity,
                 lvl.uncorrelated.eu_sensitivity, "eu sensitivity"},
            };
            for (const auto& p : pairs) {
                ++checks;
                out.require(p.wide.lo <= p.narrow.lo && p.narrow.hi <= p.wide.hi,
                            std::string(p.what) + " not contained (group " +
                                g.group + ", level " + fmt(lvl.level) + ")");
            }
        }
    }
    out.detail = std::to_string(checks) +
                 " exact endpoint containments across groups and levels";
    return out;
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<AuditDataset> corpus = fuzz_corpus();

    const struct {
        const char* name;
        Outcome result;
    } criteria[] = {
        {"identity suite (1000 fuzzed datasets, 1e-10)",
         criterion1_identities(corpus)},
        {"d4 golden chain (exact)", criterion2_golden_chain()},
        {"DGP calibration at N=50000", criterion3_dgp_calibration()},
        {"sampling vs bias patterns (R=100)", criterion4_sampling_vs_bias()},
        {"bound containment and its condition (R=100)",
         criterion5_bound_containment()},
        {"same-sign soundness (fuzz corpus)",
         criterion6_same_sign_soundness(corpus)},
        {"sensitivity coverage (200 runs, N=2000)", criterion7_coverage()},
        {"corner sufficiency (exact)", criterion8_corner_sufficiency(corpus)},
        {"expected utility and threshold oracle", criterion9_utility()},
        {"correlated mode contains uncorrelated mode",
         criterion10_correlated_containment()},
    };

    int failures = 0;
    int idx = 0;
    for (const auto& c : criteria) {
        ++idx;
        const bool ok = c.result.pass;
        if (!ok) ++failures;
        std::printf("[%2d] %-48s %s  (%s)\n", idx, c.name,
                    ok ? "PASS" : "FAIL", c.result.detail.c_str());
    }
    std::printf("acceptance: %d/10 criteria passed in %.1fs\n", 10 - failures,
                seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
