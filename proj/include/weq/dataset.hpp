#pragma once

#include "weq/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace weq {

/// Column-wise audit dataset. One row per scored individual: binary outcome,
/// binary prediction (possibly derived from a score), one membership
/// probability per declared group, and optionally the true group label.
/// Immutable after construction; safe to share across threads.
struct AuditDataset {
    Vec y;       // outcome, each 0 or 1
    Vec y_hat;   // prediction, each 0 or 1
    std::optional<Vec> score;            // raw scores in [0,1], if supplied
    Mat probs;                           // n x G membership probabilities
    std::vector<std::string> group_ids;  // declared group set, size G
    std::vector<std::string> true_labels; // empty when labels absent
    bool exhaustive = false;             // rows of probs must sum to 1

    Index n() const { return y.size(); }
    Index n_groups() const { return static_cast<Index>(group_ids.size()); }
    bool has_true_labels() const { return !true_labels.empty(); }

    /// Column index of a declared group id; throws ValidationError if absent.
    Index group_index(const std::string& group_id) const;

    /// Membership probability column for a group.
    Vec group_probs(const std::string& group_id) const;

    /// Indicator I(A_i = group). Requires true labels. True labels outside
    /// the declared group set are allowed and simply indicate non-membership.
    Vec group_indicator(const std::string& group_id) const;

    /// Row-reordered copy (used by permutation-invariance tests and the
    /// bootstrap; `idx` may repeat rows).
    AuditDataset select_rows(const std::vector<Index>& idx) const;
};

/// Validates invariants and returns the dataset. Throws ValidationError with
/// the offending row (1-based, excluding the header) on failure.
AuditDataset validate_dataset(AuditDataset ds);

/// y_hat derivation rule: 1 iff score > threshold. Idempotent on binary
/// input for any threshold in (0,1).
Vec dichotomize(const Vec& score, Scalar threshold);

struct GroupSummary {
    std::string group_id;
    Scalar mean_prob = 0.0;
    std::optional<Index> n_a;   // true-label count, when labels present
    // Confusion counts among records with A = group (labels required).
    std::optional<Index> tp, fp, tn, fn;
};

struct DatasetSummary {
    Index n = 0;
    bool has_true_labels = false;
    std::vector<GroupSummary> groups;
};

DatasetSummary summarize(const AuditDataset& ds);

} // namespace weq
