// weq — probability-weighted performance disparity auditing.
//
// Subcommands: audit, sensitivity, bound, simulate, sweep, utility.
// Outputs are plain JSON/CSV with the resolved configuration embedded, so a
// rerun of the printed command reproduces every file byte for byte.

#include "weq/bias.hpp"
#include "weq/csv.hpp"
#include "weq/errors.hpp"
#include "weq/metrics.hpp"
#include "weq/numeric.hpp"
#include "weq/sensitivity.hpp"
#include "weq/simulate.hpp"
#include "weq/utility.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace weq;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitUndefined = 3;
constexpr int kExitInfeasible = 4;

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

json estimate_json(const MetricEstimate& est) {
    return {{"value", est.value},
            {"numerator_mass", est.numerator_mass},
            {"denominator_mass", est.denominator_mass}};
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("cannot parse number '" + s + "' for " + what);
    }
}

/// "lo:hi" -> absolute interval.
Interval parse_interval(const std::string& s, const std::string& what) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw ValidationError(what + " expects lo:hi, got '" + s + "'");
    }
    return {parse_double(s.substr(0, colon), what),
            parse_double(s.substr(colon + 1), what)};
}

/// "a:b:step" or "v1,v2,..." -> axis values.
std::vector<double> parse_values(const std::string& s) {
    if (s.find(':') != std::string::npos) {
        const auto first = s.find(':');
        const auto second = s.find(':', first + 1);
        if (second == std::string::npos) {
            throw ValidationError("--values expects start:stop:step or a "
                                  "comma-separated list");
        }
        const double start = parse_double(s.substr(0, first), "--values");
        const double stop =
            parse_double(s.substr(first + 1, second - first - 1), "--values");
        const double step = parse_double(s.substr(second + 1), "--values");
        if (step <= 0.0) throw ValidationError("--values step must be positive");
        std::vector<double> out;
        for (double v = start; v <= stop + 1e-12; v += step) out.push_back(v);
        if (out.empty()) throw ValidationError("--values range is empty");
        return out;
    }
    std::vector<double> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, "--values"));
    if (out.empty()) throw ValidationError("--values is empty");
    return out;
}

/// "g1=0.3,g2=0.4" -> map.
std::map<std::string, double> parse_kv(const std::string& s,
                                       const std::string& what) {
    std::map<std::string, double> out;
    for (const auto& tok : split_list(s)) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(what + " expects group=value pairs");
        }
        out[tok.substr(0, eq)] = parse_double(tok.substr(eq + 1), what);
    }
    return out;
}

const char* kSchemaHelp =
    "Canonical CSV schema: header row with columns\n"
    "  y            binary outcome (0/1)\n"
    "  y_hat|score  binary prediction, or a score in [0,1] dichotomized\n"
    "               at --threshold (default 0.5, rule: y_hat = score > t)\n"
    "  prob_<id>    one membership-probability column per group\n"
    "  true_group   optional true group label\n"
    "Lines starting with '#' before the header are ignored.";

struct SchemaFlags {
    CsvSchema schema;
    std::string input;

    void add(CLI::App* cmd, bool input_required = true) {
        cmd->add_option("--input", input, "input CSV file")
            ->required(input_required);
        cmd->add_option("--col-y", schema.y_col, "outcome column name");
        cmd->add_option("--col-yhat", schema.y_hat_col,
                        "prediction column name");
        cmd->add_option("--col-score", schema.score_col, "score column name");
        cmd->add_option("--prob-prefix", schema.prob_prefix,
                        "probability column prefix");
        cmd->add_option("--prob-cols", prob_cols_,
                        "explicit probability columns (comma list)");
        cmd->add_option("--col-true-group", schema.true_group_col,
                        "true group column name");
        cmd->add_option("--threshold", threshold_,
                        "score dichotomization threshold");
        cmd->add_flag("--exhaustive", schema.exhaustive,
                      "group probabilities must sum to 1 per row");
    }

    AuditDataset load() {
        if (!prob_cols_.empty()) schema.prob_cols = split_list(prob_cols_);
        if (threshold_ >= 0.0) schema.threshold = threshold_;
        return ingest_csv(input, schema);
    }

    json to_json() const {
        return {{"input", input},
                {"col_y", schema.y_col},
                {"col_yhat", schema.y_hat_col},
                {"col_score", schema.score_col},
                {"prob_prefix", schema.prob_prefix},
                {"col_true_group", schema.true_group_col},
                {"threshold", threshold_ >= 0.0 ? threshold_ : 0.5},
                {"exhaustive", schema.exhaustive}};
    }

private:
    std::string prob_cols_;
    double threshold_ = -1.0;
};

/// Applies config-file values to options the user did not pass on the
/// command line (flags > config file > defaults).
class ConfigFile {
public:
    void add(CLI::App* cmd) {
        cmd->add_option("--config", path_, "JSON config file; command-line "
                                           "flags take precedence");
    }

    void merge(CLI::App* cmd) {
        if (path_.empty()) return;
        std::ifstream in(path_);
        if (!in) throw ValidationError("cannot open config file: " + path_);
        json cfg;
        try {
            in >> cfg;
        } catch (const std::exception& e) {
            throw ValidationError("config file is not valid JSON: " +
                                  std::string(e.what()));
        }
        for (auto& [key, value] : cfg.items()) {
            CLI::Option* opt = nullptr;
            try {
            opt = cmd->get_option("--" + key);
            } catch (const CLI::OptionNotFound&) {
                throw ValidationError("config file key '" + key +
                                      "' is not an option of this command");
            }
            if (opt->count() > 0) continue; // flag wins
            const std::string text =
                value.is_string() ? value.get<std::string>() : value.dump();
            opt->add_result(text);
            opt->run_callback();
        }
    }

private:
    std::string path_;
};

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out.empty() ? "." : out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + out);
    return dir;
}

json run_info(const std::string& command, const json& options) {
    return {{"tool", "weq"}, {"command", command}, {"options", options}};
}

std::string csv_config_header(const json& info) {
    return "# config: " + info.dump() + "\n";
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

struct AuditArgs {
    SchemaFlags data;
    std::string metrics = "fnr,fpr,ppv,npv,selection_rate,error_rate";
    std::string groups;
    std::string base_rates; // group=value pairs, population E[I|h1=1]
    double h1_rate = -1.0;  // population E[h1]
    std::string out = ".";
    ConfigFile config;
};

json audit_group_metric(const AuditDataset& ds, const MetricSpec& spec,
                        const std::string& group,
                        const std::map<std::string, double>& base_rates,
                        double h1_rate) {
    json j;
    j["weighted"] = estimate_json(weighted_metric(ds, spec, group));
    const double nu_w = j["weighted"]["value"].get<double>();
    j["marginal"] = estimate_json(marginal_metric(ds, spec));
    const double nu = j["marginal"]["value"].get<double>();

    const EpsilonBounds bounds = epsilon_bounds(ds, spec, group);
    j["epsilon_bounds"] = {{"eps", interval_json(bounds.eps)},
                           {"eps_prime", interval_json(bounds.eps_prime)},
                           {"cell_mean", bounds.cell_mean},
                           {"cell_mean_prime", bounds.cell_mean_prime}};

    if (ds.has_true_labels()) {
        j["oracle"] = estimate_json(oracle_metric(ds, spec, group));
        j["empirical_bias"] = empirical_bias(ds, spec, group);
        const EpsilonPair e = epsilon_sample(ds, spec, group);
        j["epsilon"] = {{"eps", e.eps}, {"eps_prime", e.eps_prime}};
        const DeltaPair d = deltas(ds, spec, group);
        j["delta"] = {{"delta", d.delta}, {"delta_star", d.delta_star}};
        j["bound_assumption"] = bound_assumption_check(d);
        j["same_sign"] = same_sign_condition(e);
        const double sample_base = sample_base_rate(ds, spec, group);
        j["base_rate_sample"] = sample_base;
        j["h1_rate_sample"] = sample_h1_rate(ds, spec);
        j["bias_plugin_sample"] =
            bias_estimate({nu_w, nu, sample_base, 1.0}, e);
        j["bias_decomposition_sample"] =
            (d.delta + nu_w * d.delta_star) /
            (sample_base * sample_h1_rate(ds, spec));
        const double ratio = pi_mass_ratio_sample(ds, spec, group);
        j["pi_mass_ratio_sample"] = ratio;
        j["bound_sample"] = bias_bound(nu_w, ratio);
    } else {
        j["oracle"] = nullptr;
        j["empirical_bias"] = nullptr;
    }

    const auto it = base_rates.find(group);
    if (it != base_rates.end() && h1_rate > 0.0) {
        const double ratio =
            pi_mass_ratio_population(ds, spec, group, it->second, h1_rate);
        j["pi_mass_ratio_population"] = ratio;
        j["bound_population"] = bias_bound(nu_w, ratio);
        j["base_rate_population"] = it->second;
        j["h1_rate_population"] = h1_rate;
        if (ds.has_true_labels()) {
            // Same decomposition, population denominator: sample and
            // population readings are both reported when both exist.
            const DeltaPair d = deltas(ds, spec, group);
            j["bias_decomposition_population"] =
                (d.delta + nu_w * d.delta_star) / (it->second * h1_rate);
        }
    }

    if (spec.kind == MetricKind::PPV || spec.kind == MetricKind::NPV) {
        j["bound_warning"] =
            "the bias bound is loose for predictive values; the numerator "
            "terms typically have opposite signs";
    }
    return j;
}

int run_audit(AuditArgs& args) {
    const AuditDataset ds = args.data.load();
    const auto base_rates =
        args.base_rates.empty()
            ? std::map<std::string, double>{}
            : parse_kv(args.base_rates, "--base-rate");

    std::vector<std::string> groups = args.groups.empty()
                                          ? ds.group_ids
                                          : split_list(args.groups);
    json options = args.data.to_json();
    options["metrics"] = args.metrics;
    options["groups"] = groups;
    options["h1_rate"] = args.h1_rate;
    options["base_rates"] = base_rates;
    const json info = run_info("audit", options);

    json report;
    report["config"] = info;
    const DatasetSummary summary = summarize(ds);
    report["n"] = summary.n;
    report["has_true_labels"] = summary.has_true_labels;
    json jsummary = json::array();
    for (const auto& g : summary.groups) {
        json gj = {{"group", g.group_id}, {"mean_prob", g.mean_prob}};
        if (g.n_a) {
            gj["n_a"] = *g.n_a;
            gj["confusion"] = {{"tp", *g.tp}, {"fp", *g.fp}, {"tn", *g.tn},
                               {"fn", *g.fn}};
        }
        jsummary.push_back(gj);
    }
    report["summary"] = jsummary;

    json metrics;
    for (const auto& name : split_list(args.metrics)) {
        const MetricSpec spec = metric_spec(parse_metric_kind(name));
        json per_group;
        for (const auto& g : groups) {
            per_group[g] =
                audit_group_metric(ds, spec, g, base_rates, args.h1_rate);
        }
        metrics[metric_name(spec.kind)] = per_group;
    }
    report["metrics"] = metrics;

    const fs::path dir = ensure_out_dir(args.out);
    write_json_file(dir / "audit.json", report);
    std::cout << "wrote " << (dir / "audit.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity
// ---------------------------------------------------------------------------

struct SensitivityArgs {
    SchemaFlags data;
    std::string metric = "fnr";
    std::string group;
    std::string eps;        // lo:hi
    std::string eps_prime;  // lo:hi
    std::string eps_rel;    // comma list of levels
    double base_rate = -1.0;
    int boot = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int grid_res = 21;
    bool grid = false;
    bool no_resample = false;
    bool corrected_add = false;
    std::string out = ".";
    ConfigFile config;
};

json sensitivity_result_json(const SensitivityResult& r) {
    json corners = json::array();
    for (const auto& c : r.corners) {
        corners.push_back({{"eps", c.eps},
                           {"eps_prime", c.eps_prime},
                           {"corrected", c.corrected_full},
                           {"boot_mean", c.mean},
                           {"boot_lo", c.p_lo},
                           {"boot_hi", c.p_hi}});
    }
    return {{"weighted", r.weighted_estimate},
            {"marginal", r.marginal_estimate},
            {"eps_range", interval_json(r.eps_range)},
            {"eps_prime_range", interval_json(r.eps_prime_range)},
            {"eps_bounds", interval_json(r.bounds.eps)},
            {"eps_prime_bounds", interval_json(r.bounds.eps_prime)},
            {"corners", corners},
            {"plausible_mean_interval", interval_json(r.plausible_mean_interval)},
            {"sensitivity_interval", interval_json(r.sensitivity_interval)},
            {"bootstrap_reps", r.bootstrap_reps},
            {"skipped_reps", r.skipped_reps}};
}

int run_sensitivity_cmd(SensitivityArgs& args) {
    const AuditDataset ds = args.data.load();
    const MetricSpec spec = metric_spec(parse_metric_kind(args.metric));
    if (args.group.empty()) {
        throw ValidationError("--group is required");
    }

    double base_rate = args.base_rate;
    if (base_rate <= 0.0) {
        if (!ds.has_true_labels()) {
            throw ValidationError(
                "--base-rate is required when the data has no true group "
                "labels (population value of E[I(A=a)|h1=1])");
        }
        base_rate = sample_base_rate(ds, spec, args.group);
    }

    struct LevelSpec {
        std::string label;
        RangeSpec eps, eps_prime;
    };
    std::vector<LevelSpec> levels;
    if (!args.eps_rel.empty()) {
        for (const auto& tok : split_list(args.eps_rel)) {
            const double level = parse_double(tok, "--eps-rel");
            levels.push_back({"rel_" + tok, RangeSpec::relative(level),
                              RangeSpec::relative(level)});
        }
    } else {
        if (args.eps.empty() || args.eps_prime.empty()) {
            throw ValidationError(
                "give either --eps-rel levels or both --eps and --eps-prime");
        }
        const Interval e = parse_interval(args.eps, "--eps");
        const Interval ep = parse_interval(args.eps_prime, "--eps-prime");
        levels.push_back({"abs", RangeSpec::absolute(e.lo, e.hi),
                          RangeSpec::absolute(ep.lo, ep.hi)});
    }

    json options = args.data.to_json();
    options["metric"] = args.metric;
    options["group"] = args.group;
    options["eps"] = args.eps;
    options["eps_prime"] = args.eps_prime;
    options["eps_rel"] = args.eps_rel;
    options["base_rate"] = base_rate;
    options["boot"] = args.boot;
    options["alpha"] = args.alpha;
    options["seed"] = args.seed;
    options["grid_res"] = args.grid_res;
    options["resample"] = !args.no_resample;
    options["corrected_add"] = args.corrected_add;
    const json info = run_info("sensitivity", options);

    const fs::path dir = ensure_out_dir(args.out);
    json results = json::array();
    for (const auto& lvl : levels) {
        SensitivityConfig cfg;
        cfg.eps_range = lvl.eps;
        cfg.eps_prime_range = lvl.eps_prime;
        cfg.grid_resolution = args.grid_res;
        cfg.base_rate = base_rate;
        cfg.bootstrap_reps = args.boot;
        cfg.alpha = args.alpha;
        cfg.seed = args.seed;
        cfg.resample = !args.no_resample;
        cfg.add_bias = args.corrected_add;

        const SensitivityResult r = run_sensitivity(ds, spec, args.group, cfg);
        json rj = sensitivity_result_json(r);
        rj["label"] = lvl.label;
        results.push_back(rj);

        if (args.grid) {
            const auto rows = contour_grid(ds, spec, args.group, cfg);
            std::ostringstream text;
            text << csv_config_header(info);
            write_grid_csv(text, rows);
            const fs::path grid_path = dir / ("grid_" + lvl.label + ".csv");
            write_text_file(grid_path, text.str());
            std::cout << "wrote " << grid_path.string() << "\n";
        }
    }

    json out;
    out["config"] = info;
    out["results"] = results;
    write_json_file(dir / "sensitivity.json", out);
    std::cout << "wrote " << (dir / "sensitivity.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

struct BoundArgs {
    SchemaFlags data;
    std::string metric = "fnr";
    std::string group;
    double base_rate = -1.0;
    double h1_rate = -1.0;
    bool assume_same_sign = false;
    std::string out = ".";
    ConfigFile config;
};

int run_bound(BoundArgs& args) {
    const AuditDataset ds = args.data.load();
    const MetricSpec spec = metric_spec(parse_metric_kind(args.metric));
    if (args.group.empty()) throw ValidationError("--group is required");

    json options = args.data.to_json();
    options["metric"] = args.metric;
    options["group"] = args.group;
    options["base_rate"] = args.base_rate;
    options["h1_rate"] = args.h1_rate;
    options["assume_same_sign"] = args.assume_same_sign;

    json report;
    report["config"] = run_info("bound", options);
    const double nu_w = weighted_metric(ds, spec, args.group).value;
    report["weighted"] = nu_w;

    bool verified = args.assume_same_sign;
    if (ds.has_true_labels()) {
        const DeltaPair d = deltas(ds, spec, args.group);
        const EpsilonPair e = epsilon_sample(ds, spec, args.group);
        report["bound_assumption"] = bound_assumption_check(d);
        report["same_sign"] = same_sign_condition(e);
        verified = verified || bound_assumption_check(d);
        const double ratio = pi_mass_ratio_sample(ds, spec, args.group);
        report["pi_mass_ratio_sample"] = ratio;
        report["bound_sample"] = bias_bound(nu_w, ratio);
    }
    if (args.base_rate > 0.0 && args.h1_rate > 0.0) {
        const double ratio = pi_mass_ratio_population(
            ds, spec, args.group, args.base_rate, args.h1_rate);
        report["pi_mass_ratio_population"] = ratio;
        report["bound_population"] = bias_bound(nu_w, ratio);
    } else if (!ds.has_true_labels()) {
        throw ValidationError(
            "bound needs either true labels or both --base-rate and "
            "--h1-rate population values");
    }
    report["assumption_verified"] = verified;
    if (!verified) {
        std::cerr << "warning: the bound's validity condition (|delta| <= |delta*|) was not "
                     "verified; the bound is valid only under it\n";
    }
    if (spec.kind == MetricKind::PPV || spec.kind == MetricKind::NPV) {
        report["bound_warning"] =
            "the bias bound is loose for predictive values";
        std::cerr << "warning: the bound for " << metric_name(spec.kind)
                  << " is not sharp enough for practical use\n";
    }

    const fs::path dir = ensure_out_dir(args.out);
    write_json_file(dir / "bound.json", report);
    std::cout << "wrote " << (dir / "bound.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / sweep
// ---------------------------------------------------------------------------

struct SimFlags {
    SimConfig cfg;
    std::string assignment = "bernoulli";

    void add(CLI::App* cmd) {
        cmd->add_option("--beta1", cfg.beta1, "conditional dependence of Y on A");
        cmd->add_option("--beta2", cfg.beta2, "group probability mean shift");
        cmd->add_option("--beta3", cfg.beta3, "covariance control, [0,20]");
        cmd->add_option("--n-pop", cfg.n_population, "population size");
        cmd->add_option("--n-sample", cfg.n_sample, "test sample size");
        cmd->add_option("--n-train", cfg.n_train,
                        "training rows (0: half the population)");
        cmd->add_option("--threshold", cfg.threshold, "score dichotomization");
        cmd->add_option("--seed", cfg.seed, "RNG seed");
        cmd->add_option("--assignment", assignment,
                        "group realization: bernoulli or threshold");
    }

    SimConfig resolve() const {
        SimConfig out = cfg;
        if (assignment == "bernoulli") {
            out.assignment = GroupAssignment::Bernoulli;
        } else if (assignment == "threshold") {
            out.assignment = GroupAssignment::Threshold;
        } else {
            throw ValidationError(
                "--assignment must be 'bernoulli' or 'threshold'");
        }
        return out;
    }

    json to_json() const {
        return {{"beta1", cfg.beta1},     {"beta2", cfg.beta2},
                {"beta3", cfg.beta3},     {"n_pop", cfg.n_population},
                {"n_sample", cfg.n_sample}, {"n_train", cfg.resolved_n_train()},
                {"threshold", cfg.threshold}, {"seed", cfg.seed},
                {"assignment", assignment}};
    }
};

struct SimulateArgs {
    SimFlags sim;
    std::string out = ".";
    ConfigFile config;
};

int run_simulate(SimulateArgs& args) {
    const SimConfig cfg = args.sim.resolve();
    const SimPopulation pop = generate_population(cfg);

    const auto rows = draw_test_sample(
        pop, cfg.n_sample, RngStream::derive(cfg.seed, {0x7E57u, 0u, 0u}));
    const AuditDataset ds = to_audit_dataset(pop, rows);

    const json info = run_info("simulate", args.sim.to_json());
    const fs::path dir = ensure_out_dir(args.out);

    std::ostringstream text;
    text << csv_config_header(info);
    write_csv(text, ds);
    write_text_file(dir / "sample.csv", text.str());

    json summary;
    summary["config"] = info;
    summary["population"] = {
        {"n", pop.n()},
        {"group_share", pop.a.mean()},
        {"outcome_rate", pop.y.mean()},
        {"auc_pi_vs_group", group_auc(pop.pi, pop.a)},
        {"auc_score_vs_outcome", group_auc(pop.score, pop.y)},
        {"model_coef", std::vector<double>(pop.model.coef.data(),
                                           pop.model.coef.data() +
                                               pop.model.coef.size())},
        {"model_iterations", pop.model.iterations}};
    const MetricSpec fnr = metric_spec(MetricKind::FNR);
    json per_group;
    for (const std::string g : {"1", "0"}) {
        per_group[g] = {{"weighted_fnr", weighted_metric(ds, fnr, g).value},
                        {"oracle_fnr", oracle_metric(ds, fnr, g).value},
                        {"empirical_bias", empirical_bias(ds, fnr, g)}};
    }
    summary["test_sample"] = {{"n", ds.n()}, {"fnr", per_group}};
    write_json_file(dir / "sim_summary.json", summary);
    std::cout << "wrote " << (dir / "sample.csv").string() << " and "
              << (dir / "sim_summary.json").string() << "\n";
    return 0;
}

struct SweepArgs {
    SimFlags sim;
    std::string axis = "beta1";
    std::string values;
    int reps = 100;
    std::string metric = "fnr";
    unsigned threads = 0;
    std::string out = ".";
    ConfigFile config;
};

int run_sweep(SweepArgs& args) {
    const SimConfig cfg = args.sim.resolve();
    const SweepAxis axis = parse_sweep_axis(args.axis);
    const std::vector<double> values = parse_values(args.values);
    const MetricKind metric = parse_metric_kind(args.metric);

    json options = args.sim.to_json();
    options["axis"] = args.axis;
    options["values"] = values;
    options["reps"] = args.reps;
    options["metric"] = args.metric;
    const json info = run_info("sweep", options);

    const SweepTable table =
        run_scenario_sweep(cfg, axis, values, args.reps, metric, args.threads);

    std::ostringstream text;
    text << csv_config_header(info);
    write_sweep_csv(text, table);
    const fs::path dir = ensure_out_dir(args.out);
    write_text_file(dir / "sweep.csv", text.str());
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// utility
// ---------------------------------------------------------------------------

struct UtilityArgs {
    SchemaFlags data;
    std::string groups;
    std::string prevalence; // group=value
    double r = 1.0;
    std::string eps_rel = "0.05,0.1,0.2";
    int boot = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    bool select_thr = false;
    std::string out = ".";
    ConfigFile config;
};

int run_utility(UtilityArgs& args) {
    AuditDataset ds = args.data.load();

    json options = args.data.to_json();
    options["groups"] = args.groups;
    options["prevalence"] = args.prevalence;
    options["r"] = args.r;
    options["eps_rel"] = args.eps_rel;
    options["boot"] = args.boot;
    options["alpha"] = args.alpha;
    options["seed"] = args.seed;
    options["select_threshold"] = args.select_thr;

    std::optional<double> chosen_threshold;
    if (args.select_thr) {
        if (!ds.score) {
            throw ValidationError(
                "--select-threshold needs a score column in the input");
        }
        chosen_threshold = select_threshold(*ds.score, ds.y, args.r);
        ds.y_hat = dichotomize(*ds.score, *chosen_threshold);
    }

    GroupUtilityConfig cfg;
    cfg.groups = args.groups.empty() ? ds.group_ids : split_list(args.groups);
    cfg.prevalence = parse_kv(args.prevalence, "--prevalence");
    cfg.r = args.r;
    for (const auto& tok : split_list(args.eps_rel)) {
        cfg.levels.push_back(parse_double(tok, "--eps-rel"));
    }
    cfg.bootstrap_reps = args.boot;
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;

    const GroupUtilityReport rep = group_utility_report(ds, cfg);
    const json info = run_info("utility", options);

    json out;
    out["config"] = info;
    if (chosen_threshold) out["selected_threshold"] = *chosen_threshold;
    out["r"] = rep.r;
    out["marginal_outcome_rate"] = rep.marginal_outcome_rate;
    json groups = json::array();
    for (const auto& g : rep.groups) {
        json gj = {{"group", g.group},
                   {"prevalence", g.prevalence},
                   {"group_share", g.group_share},
                   {"base_rate_fnr", g.base_rate_fnr},
                   {"base_rate_fpr", g.base_rate_fpr},
                   {"weighted_fpr", g.weighted_fpr},
                   {"weighted_fnr", g.weighted_fnr},
                   {"eu_point", g.eu_point},
                   {"r_warning", g.r_warning}};
        if (g.r_warning) {
            std::cerr << "warning: group " << g.group
                      << ": r is outside the admissible interval\n";
        }
        json levels = json::array();
        for (const auto& lvl : g.levels) {
            auto set_json = [](const UtilityIntervalSet& s) {
                return json{
                    {"fpr_plausible", interval_json(s.fpr_plausible)},
                    {"fpr_sensitivity", interval_json(s.fpr_sensitivity)},
                    {"fnr_plausible", interval_json(s.fnr_plausible)},
                    {"fnr_sensitivity", interval_json(s.fnr_sensitivity)},
                    {"eu_plausible", interval_json(s.eu_plausible)},
                    {"eu_sensitivity", interval_json(s.eu_sensitivity)}};
            };
            levels.push_back({{"level", lvl.level},
                              {"uncorrelated", set_json(lvl.uncorrelated)},
                              {"correlated", set_json(lvl.correlated)}});
        }
        gj["levels"] = levels;
        groups.push_back(gj);
    }
    out["groups"] = groups;

    const fs::path dir = ensure_out_dir(args.out);
    write_json_file(dir / "utility.json", out);
    std::ostringstream text;
    text << csv_config_header(info);
    write_utility_csv(text, rep);
    write_text_file(dir / "utility.csv", text.str());
    std::cout << "wrote " << (dir / "utility.json").string() << " and "
              << (dir / "utility.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "weq: group performance disparities from probabilistic group "
        "membership, with bias sensitivity analysis.\n\n" +
        std::string(kSchemaHelp)};
    app.require_subcommand(1);

    AuditArgs audit_args;
    auto* audit_cmd = app.add_subcommand(
        "audit", "weighted (and oracle, when labeled) metrics with the full "
                 "bias decomposition");
    audit_args.data.add(audit_cmd);
    audit_cmd->add_option("--metrics", audit_args.metrics,
                          "comma list: fnr,fpr,ppv,npv,selection_rate,"
                          "error_rate");
    audit_cmd->add_option("--groups", audit_args.groups,
                          "groups to audit (default: all declared)");
    audit_cmd->add_option("--base-rate", audit_args.base_rates,
                          "population E[I(A=a)|h1=1] per group, g=v pairs");
    audit_cmd->add_option("--h1-rate", audit_args.h1_rate,
                          "population E[h1]");
    audit_cmd->add_option("--out", audit_args.out, "output directory");
    audit_args.config.add(audit_cmd);

    SensitivityArgs sens_args;
    auto* sens_cmd = app.add_subcommand(
        "sensitivity", "bootstrap sensitivity analysis over an (eps, eps') "
                       "range");
    sens_args.data.add(sens_cmd);
    sens_cmd->add_option("--metric", sens_args.metric, "metric name");
    sens_cmd->add_option("--group", sens_args.group, "group id");
    sens_cmd->add_option("--eps", sens_args.eps, "absolute eps range lo:hi");
    sens_cmd->add_option("--eps-prime", sens_args.eps_prime,
                         "absolute eps' range lo:hi");
    sens_cmd->add_option("--eps-rel", sens_args.eps_rel,
                         "relative error levels (comma list), one result per "
                         "level");
    sens_cmd->add_option("--base-rate", sens_args.base_rate,
                         "population E[I(A=a)|h1=1]; sample value used when "
                         "labels are present and this is omitted");
    sens_cmd->add_option("--boot", sens_args.boot, "bootstrap replications");
    sens_cmd->add_option("--alpha", sens_args.alpha, "interval level");
    sens_cmd->add_option("--seed", sens_args.seed, "RNG seed");
    sens_cmd->add_option("--grid-res", sens_args.grid_res,
                         "grid points per axis");
    sens_cmd->add_flag("--grid", sens_args.grid, "also write the contour grid");
    sens_cmd->add_flag("--no-resample", sens_args.no_resample,
                       "replications reuse the full dataset (testing)");
    sens_cmd->add_flag("--corrected-add", sens_args.corrected_add,
                       "corrected = weighted + bias instead of weighted - bias");
    sens_cmd->add_option("--out", sens_args.out, "output directory");
    sens_args.config.add(sens_cmd);

    BoundArgs bound_args;
    auto* bound_cmd = app.add_subcommand(
        "bound", "worst-case absolute bias bound for a weighted metric");
    bound_args.data.add(bound_cmd);
    bound_cmd->add_option("--metric", bound_args.metric, "metric name");
    bound_cmd->add_option("--group", bound_args.group, "group id");
    bound_cmd->add_option("--base-rate", bound_args.base_rate,
                          "population E[I(A=a)|h1=1]");
    bound_cmd->add_option("--h1-rate", bound_args.h1_rate, "population E[h1]");
    bound_cmd->add_flag("--assume-same-sign", bound_args.assume_same_sign,
                        "assert that eps and eps' share a sign");
    bound_cmd->add_option("--out", bound_args.out, "output directory");
    bound_args.config.add(bound_cmd);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "draw one synthetic population and write an audit-ready "
                    "test sample");
    sim_args.sim.add(sim_cmd);
    sim_cmd->add_option("--out", sim_args.out, "output directory");
    sim_args.config.add(sim_cmd);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "replicated scenario sweep over beta1/beta2/beta3/n_sample");
    sweep_args.sim.add(sweep_cmd);
    sweep_cmd->add_option("--axis", sweep_args.axis,
                          "beta1, beta2, beta3, or n_sample");
    sweep_cmd->add_option("--values", sweep_args.values,
                          "start:stop:step or comma list")
        ->required();
    sweep_cmd->add_option("--reps", sweep_args.reps, "replications per value");
    sweep_cmd->add_option("--metric", sweep_args.metric, "metric name");
    sweep_cmd->add_option("--threads", sweep_args.threads,
                          "worker threads (0: hardware)");
    sweep_cmd->add_option("--out", sweep_args.out, "output directory");
    sweep_args.config.add(sweep_cmd);

    UtilityArgs util_args;
    auto* util_cmd = app.add_subcommand(
        "utility", "per-group expected-utility report with bias-corrected "
                   "FPR/FNR intervals");
    util_args.data.add(util_cmd);
    util_cmd->add_option("--groups", util_args.groups,
                         "groups to report (default: all declared)");
    util_cmd->add_option("--prevalence", util_args.prevalence,
                         "outcome prevalence per group, g=v pairs")
        ->required();
    util_cmd->add_option("--r", util_args.r, "relative utility ratio");
    util_cmd->add_option("--eps-rel", util_args.eps_rel,
                         "relative error levels (comma list)");
    util_cmd->add_option("--boot", util_args.boot, "bootstrap replications");
    util_cmd->add_option("--alpha", util_args.alpha, "interval level");
    util_cmd->add_option("--seed", util_args.seed, "RNG seed");
    util_cmd->add_flag("--select-threshold", util_args.select_thr,
                       "choose the score threshold by expected utility first");
    util_cmd->add_option("--out", util_args.out, "output directory");
    util_args.config.add(util_cmd);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_name() == "CallForHelp" ||
                e.get_name() == "CallForAllHelp" ||
                e.get_name() == "CallForVersion") {
                return app.exit(e);
            }
            std::cerr << "error: " << e.what() << "\n";
            return kExitValidation;
        }

        if (audit_cmd->parsed()) {
            audit_args.config.merge(audit_cmd);
            return run_audit(audit_args);
        }
        if (sens_cmd->parsed()) {
            sens_args.config.merge(sens_cmd);
            return run_sensitivity_cmd(sens_args);
        }
        if (bound_cmd->parsed()) {
            bound_args.config.merge(bound_cmd);
            return run_bound(bound_args);
        }
        if (sim_cmd->parsed()) {
            sim_args.config.merge(sim_cmd);
            return run_simulate(sim_args);
        }
        if (sweep_cmd->parsed()) {
            sweep_args.config.merge(sweep_cmd);
            return run_sweep(sweep_args);
        }
        if (util_cmd->parsed()) {
            util_args.config.merge(util_cmd);
            return run_utility(util_args);
        }
        return kExitValidation;
    } catch (const InfeasibleRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const UndefinedMetricError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUndefined;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
