#pragma once

#include "weq/dataset.hpp"
#include "weq/sensitivity.hpp"
#include "weq/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace weq {

/// Inputs to the expected-utility measure: class proportions, error rates,
/// the mean predicted value among positives (only used for the r
/// admissibility check), and the relative utility ratio r of a true
/// negative to a true positive.
struct UtilityInputs {
    Scalar p0 = 0.0;
    Scalar p1 = 0.0;
    Scalar tau0 = 0.0; // false positive rate
    Scalar tau1 = 0.0; // false negative rate
    Scalar P1 = 0.0;
    Scalar r = 1.0;
};

/// p0 * (1 - tau0) * r + p1 * (1 - tau1). Increasing in r, decreasing in
/// both error rates.
Scalar expected_utility(const UtilityInputs& inputs);

/// Open interval (p1/p0, P1/(1-P1)). r outside it is admissible but
/// reported as a warning by callers.
Interval admissible_r_interval(const UtilityInputs& inputs);
bool r_admissible(const UtilityInputs& inputs);

/// Expected-utility-maximizing score threshold. Candidates are 0, 1, and
/// midpoints between consecutive distinct sorted scores; ties break toward
/// the smaller threshold.
Scalar select_threshold(const Vec& scores, const Vec& outcomes, Scalar r);

struct GroupUtilityConfig {
    std::vector<std::string> groups;
    std::map<std::string, Scalar> prevalence; // P(Y=1 | A=a) per group
    Scalar r = 1.0;
    std::vector<Scalar> levels;               // relative error levels
    int bootstrap_reps = 1000;
    Scalar alpha = 0.05;
    std::uint64_t seed = 0;
    bool resample = true;
    bool add_bias = false;
};

/// Interval block for one (group, level, error mode).
struct UtilityIntervalSet {
    Interval fpr_plausible, fpr_sensitivity;
    Interval fnr_plausible, fnr_sensitivity;
    Interval eu_plausible, eu_sensitivity;
};

struct GroupUtilityLevel {
    Scalar level = 0.0;
    UtilityIntervalSet uncorrelated; // sign-aligned probability error
    UtilityIntervalSet correlated;   // worst-case opposed error
};

struct GroupUtilityEntry {
    std::string group;
    Scalar prevalence = 0.0;
    Scalar group_share = 0.0;    // mean membership probability
    Scalar base_rate_fnr = 0.0;  // P(A=a | Y=1)
    Scalar base_rate_fpr = 0.0;  // P(A=a | Y=0)
    Scalar weighted_fpr = 0.0;
    Scalar weighted_fnr = 0.0;
    Scalar eu_point = 0.0;
    bool r_warning = false;      // r outside the admissible interval
    std::vector<GroupUtilityLevel> levels;
};

struct GroupUtilityReport {
    Scalar r = 1.0;
    Scalar marginal_outcome_rate = 0.0; // sample P(Y=1)
    std::vector<GroupUtilityEntry> groups;
};

/// Per-group FPR/FNR sensitivity analyses propagated into expected-utility
/// intervals. Group base rates combine user-supplied prevalence with the
/// sample group share and outcome rate. Throws ValidationError listing any
/// requested group without a prevalence entry.
GroupUtilityReport group_utility_report(const AuditDataset& ds,
                                        const GroupUtilityConfig& config);

/// Flat table: group,level,mode,quantity,point,plausible_lo,plausible_hi,
/// sens_lo,sens_hi.
void write_utility_csv(std::ostream& out, const GroupUtilityReport& report);

} // namespace weq
