#pragma once

#include "weq/dataset.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace weq {

/// Column mapping for audit CSV files. The canonical layout is
///   y, y_hat|score, prob_<groupid>..., true_group?
/// Probability columns are discovered by prefix unless listed explicitly.
struct CsvSchema {
    std::string y_col = "y";
    std::string y_hat_col = "y_hat";
    std::string score_col = "score";
    std::string prob_prefix = "prob_";
    std::vector<std::string> prob_cols; // explicit override of the prefix scan
    std::string true_group_col = "true_group";
    std::optional<Scalar> threshold;    // score dichotomization cut, default 0.5
    bool exhaustive = false;
};

/// Reads, maps, and validates an audit CSV. UTF-8, comma-separated, header
/// row required; '#'-prefixed leading lines are skipped. Throws
/// ValidationError naming the column or 1-based data row on any defect.
AuditDataset ingest_csv(const std::string& path, const CsvSchema& schema = {});

AuditDataset ingest_csv_stream(std::istream& in, const CsvSchema& schema = {});

/// Writes the canonical layout with shortest round-trip number formatting,
/// so ingest(write(ds)) reproduces every field bit-for-bit.
void write_csv(std::ostream& out, const AuditDataset& ds);
void write_csv_file(const std::string& path, const AuditDataset& ds);

} // namespace weq
