#include "weq/dataset.hpp"

#include "weq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace weq {

Index AuditDataset::group_index(const std::string& group_id) const {
    auto it = std::find(group_ids.begin(), group_ids.end(), group_id);
    if (it == group_ids.end()) {
        throw ValidationError("unknown group '" + group_id +
                              "': not in the declared group set");
    }
    return static_cast<Index>(it - group_ids.begin());
}

Vec AuditDataset::group_probs(const std::string& group_id) const {
    return probs.col(group_index(group_id)).array();
}

Vec AuditDataset::group_indicator(const std::string& group_id) const {
    if (!has_true_labels()) {
        throw ValidationError("true group labels are required but absent");
    }
    Vec ind(n());
    for (Index i = 0; i < n(); ++i) {
        ind[i] = (true_labels[static_cast<std::size_t>(i)] == group_id) ? 1.0
                                                                        : 0.0;
    }
    return ind;
}

AuditDataset AuditDataset::select_rows(const std::vector<Index>& idx) const {
    AuditDataset out;
    const Index m = static_cast<Index>(idx.size());
    out.y.resize(m);
    out.y_hat.resize(m);
    out.probs.resize(m, probs.cols());
    if (score) out.score.emplace(m);
    if (has_true_labels()) out.true_labels.resize(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
        const Index j = idx[static_cast<std::size_t>(i)];
        out.y[i] = y[j];
        out.y_hat[i] = y_hat[j];
        out.probs.row(i) = probs.row(j);
        if (score) (*out.score)[i] = (*score)[j];
        if (has_true_labels()) {
            out.true_labels[static_cast<std::size_t>(i)] =
                true_labels[static_cast<std::size_t>(j)];
        }
    }
    out.group_ids = group_ids;
    out.exhaustive = exhaustive;
    return out;
}

Vec dichotomize(const Vec& score, Scalar threshold) {
    return (score > threshold).cast<Scalar>();
}

namespace {

bool is_binary(Scalar v) { return v == 0.0 || v == 1.0; }

} // namespace

AuditDataset validate_dataset(AuditDataset ds) {
    const Index n = ds.y.size();
    if (n < 1) throw ValidationError("dataset is empty");
    if (ds.group_ids.empty()) {
        throw ValidationError("no group probability columns declared");
    }
    if (ds.y_hat.size() != n || ds.probs.rows() != n ||
        ds.probs.cols() != ds.n_groups() ||
        (ds.score && ds.score->size() != n) ||
        (ds.has_true_labels() &&
         static_cast<Index>(ds.true_labels.size()) != n)) {
        throw ValidationError("column lengths are inconsistent");
    }
    for (Index i = 0; i < n; ++i) {
        const long row = static_cast<long>(i) + 1;
        if (!is_binary(ds.y[i])) {
            throw ValidationError("row " + std::to_string(row) +
                                  ": outcome must be 0 or 1");
        }
        if (!is_binary(ds.y_hat[i])) {
            throw ValidationError("row " + std::to_string(row) +
                                  ": prediction must be 0 or 1");
        }
        Scalar row_sum = 0.0;
        for (Index g = 0; g < ds.n_groups(); ++g) {
            const Scalar p = ds.probs(i, g);
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ValidationError(
                    "row " + std::to_string(row) + ": probability for group '" +
                    ds.group_ids[static_cast<std::size_t>(g)] + "' is " +
                    std::to_string(p) + ", outside [0,1]");
            }
            row_sum += p;
        }
        if (ds.exhaustive && std::abs(row_sum - 1.0) > 1e-6) {
            throw ValidationError("row " + std::to_string(row) +
                                  ": probabilities sum to " +
                                  std::to_string(row_sum) +
                                  " but the group set is declared exhaustive");
        }
    }
    return ds;
}

DatasetSummary summarize(const AuditDataset& ds) {
    if (ds.group_ids.empty()) {
        throw ValidationError("no group probability columns declared");
    }
    DatasetSummary out;
    out.n = ds.n();
    out.has_true_labels = ds.has_true_labels();
    for (Index g = 0; g < ds.n_groups(); ++g) {
        GroupSummary gs;
        gs.group_id = ds.group_ids[static_cast<std::size_t>(g)];
        gs.mean_prob = ds.probs.col(g).mean();
        if (ds.has_true_labels()) {
            const Vec ind = ds.group_indicator(gs.group_id);
            gs.n_a = static_cast<Index>(ind.sum());
            gs.tp = static_cast<Index>((ind * ds.y * ds.y_hat).sum());
            gs.fp = static_cast<Index>((ind * (1.0 - ds.y) * ds.y_hat).sum());
            gs.fn = static_cast<Index>((ind * ds.y * (1.0 - ds.y_hat)).sum());
            gs.tn = static_cast<Index>(
                (ind * (1.0 - ds.y) * (1.0 - ds.y_hat)).sum());
        }
        out.groups.push_back(std::move(gs));
    }
    return out;
}

} // namespace weq
