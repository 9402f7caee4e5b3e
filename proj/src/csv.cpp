#include "weq/csv.hpp"

#include "weq/errors.hpp"
#include "weq/numeric.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace weq {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

Scalar parse_number(const std::string& raw, long row, const std::string& col) {
    const std::string s = trim(raw);
    if (s.empty()) {
        throw ValidationError("row " + std::to_string(row) +
                              ": missing value in column '" + col + "'");
    }
    Scalar v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ValidationError("row " + std::to_string(row) + ": column '" +
                              col + "' value '" + s + "' is not a number");
    }
    return v;
}

long find_col(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return static_cast<long>(j);
    }
    return -1;
}

} // namespace

AuditDataset ingest_csv_stream(std::istream& in, const CsvSchema& schema) {
    std::string line;
    // Header, skipping leading comment lines.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        for (auto& f : split_line(line)) header.push_back(trim(f));
        break;
    }
    if (header.empty()) throw ValidationError("input has no header row");

    const long y_idx = find_col(header, schema.y_col);
    if (y_idx < 0) {
        throw ValidationError("schema error: outcome column '" + schema.y_col +
                              "' not found");
    }
    const long y_hat_idx = find_col(header, schema.y_hat_col);
    const long score_idx = find_col(header, schema.score_col);
    if (y_hat_idx < 0 && score_idx < 0) {
        throw ValidationError("schema error: need a prediction column '" +
                              schema.y_hat_col + "' or a score column '" +
                              schema.score_col + "'");
    }
    const long true_idx = find_col(header, schema.true_group_col);

    std::vector<long> prob_idx;
    std::vector<std::string> group_ids;
    if (!schema.prob_cols.empty()) {
        for (const auto& name : schema.prob_cols) {
            const long j = find_col(header, name);
            if (j < 0) {
                throw ValidationError("schema error: probability column '" +
                                      name + "' not found");
            }
            prob_idx.push_back(j);
            group_ids.push_back(name.rfind(schema.prob_prefix, 0) == 0
                                    ? name.substr(schema.prob_prefix.size())
                                    : name);
        }
    } else {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j].rfind(schema.prob_prefix, 0) == 0) {
                prob_idx.push_back(static_cast<long>(j));
                group_ids.push_back(header[j].substr(schema.prob_prefix.size()));
            }
        }
    }
    if (prob_idx.empty()) {
        throw ValidationError(
            "schema error: no probability columns (prefix '" +
            schema.prob_prefix + "') found");
    }

    std::vector<Scalar> ys, yhats, scores;
    std::vector<std::vector<Scalar>> probs(prob_idx.size());
    std::vector<std::string> labels;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) +
                                  " fields, found " +
                                  std::to_string(fields.size()));
        }
        ys.push_back(parse_number(fields[static_cast<std::size_t>(y_idx)], row,
                                  schema.y_col));
        if (score_idx >= 0) {
            scores.push_back(parse_number(
                fields[static_cast<std::size_t>(score_idx)], row,
                schema.score_col));
        }
        if (y_hat_idx >= 0) {
            yhats.push_back(parse_number(
                fields[static_cast<std::size_t>(y_hat_idx)], row,
                schema.y_hat_col));
        }
        for (std::size_t k = 0; k < prob_idx.size(); ++k) {
            probs[k].push_back(parse_number(
                fields[static_cast<std::size_t>(prob_idx[k])], row,
                "prob_" + group_ids[k]));
        }
        if (true_idx >= 0) {
            const std::string lab =
                trim(fields[static_cast<std::size_t>(true_idx)]);
            if (lab.empty()) {
                throw ValidationError("row " + std::to_string(row) +
                                      ": missing value in column '" +
                                      schema.true_group_col + "'");
            }
            labels.push_back(lab);
        }
    }
    if (ys.empty()) throw ValidationError("input has no data rows");

    const Index n = static_cast<Index>(ys.size());
    AuditDataset ds;
    ds.y = Eigen::Map<const Vec>(ys.data(), n);
    if (!scores.empty()) ds.score = Eigen::Map<const Vec>(scores.data(), n);
    if (!yhats.empty()) {
        ds.y_hat = Eigen::Map<const Vec>(yhats.data(), n);
    } else {
        ds.y_hat = dichotomize(*ds.score, schema.threshold.value_or(0.5));
    }
    ds.probs.resize(n, static_cast<Index>(prob_idx.size()));
    for (std::size_t k = 0; k < probs.size(); ++k) {
        ds.probs.col(static_cast<Index>(k)) =
            Eigen::Map<const Eigen::VectorXd>(probs[k].data(), n);
    }
    ds.group_ids = std::move(group_ids);
    ds.true_labels = std::move(labels);
    ds.exhaustive = schema.exhaustive;
    return validate_dataset(std::move(ds));
}

AuditDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file: " + path);
    return ingest_csv_stream(in, schema);
}

void write_csv(std::ostream& out, const AuditDataset& ds) {
    out << "y,y_hat";
    if (ds.score) out << ",score";
    for (const auto& g : ds.group_ids) out << ",prob_" << g;
    if (ds.has_true_labels()) out << ",true_group";
    out << "\n";
    for (Index i = 0; i < ds.n(); ++i) {
        out << format_double(ds.y[i]) << ',' << format_double(ds.y_hat[i]);
        if (ds.score) out << ',' << format_double((*ds.score)[i]);
        for (Index g = 0; g < ds.n_groups(); ++g) {
            out << ',' << format_double(ds.probs(i, g));
        }
        if (ds.has_true_labels()) {
            out << ',' << ds.true_labels[static_cast<std::size_t>(i)];
        }
        out << "\n";
    }
}

void write_csv_file(const std::string& path, const AuditDataset& ds) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    write_csv(out, ds);
}

} // namespace weq
