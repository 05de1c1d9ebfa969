#include "rbeval/stats/contingency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rbeval/errors.hpp"
#include "rbeval/stats/special.hpp"

namespace rbeval::stats {

double ContingencyTable::total() const {
    double t = 0.0;
    for (const auto& row : counts)
        for (double c : row) t += c;
    return t;
}

std::vector<double> ContingencyTable::row_totals() const {
    std::vector<double> t(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (double c : counts[i]) t[i] += c;
    return t;
}

std::array<double, kOutcomeCount> ContingencyTable::column_totals() const {
    std::array<double, kOutcomeCount> t{};
    for (const auto& row : counts)
        for (std::size_t j = 0; j < kOutcomeCount; ++j) t[j] += row[j];
    return t;
}

ContingencyTable build_contingency(const std::vector<RunRecord>& records, GroupBy by) {
    ContingencyTable table;
    std::map<std::string, std::size_t> row_index;

    switch (by) {
        case GroupBy::Family:
            table.row_factor = "family";
            for (Family f : kAllFamilies) table.row_labels.emplace_back(to_string(f));
            break;
        case GroupBy::ArtifactType:
            table.row_factor = "artifact_type";
            for (Artifact a : kAllArtifacts) table.row_labels.emplace_back(to_string(a));
            break;
        case GroupBy::ModelId: {
            table.row_factor = "model_id";
            std::set<std::string> models;
            for (const auto& r : records) {
                if (r.analyzable()) models.insert(r.model_id);
            }
            table.row_labels.assign(models.begin(), models.end());
            break;
        }
    }
    for (std::size_t i = 0; i < table.row_labels.size(); ++i) row_index[table.row_labels[i]] = i;
    table.counts.assign(table.row_labels.size(), {});

    for (const auto& r : records) {
        if (!r.analyzable()) continue;
        std::string label;
        switch (by) {
            case GroupBy::Family: label = to_string(r.family); break;
            case GroupBy::ArtifactType: label = to_string(r.artifact_type); break;
            case GroupBy::ModelId: label = r.model_id; break;
        }
        table.counts[row_index.at(label)][static_cast<std::size_t>(*r.outcome)] += 1.0;
    }
    return table;
}

ChiSquareResult chi_square_test(const ContingencyTable& table) {
    ChiSquareResult res;

    std::vector<std::size_t> keep_rows;
    const std::vector<double> row_tot = table.row_totals();
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
        if (row_tot[i] > 0.0) {
            keep_rows.push_back(i);
        } else {
            res.dropped_rows.push_back(table.row_labels[i]);
        }
    }

    std::array<double, kOutcomeCount> col_tot_all = table.column_totals();
    std::vector<std::size_t> keep_cols;
    for (std::size_t j = 0; j < kOutcomeCount; ++j) {
        if (col_tot_all[j] > 0.0) {
            keep_cols.push_back(j);
        } else {
            res.dropped_cols.emplace_back(to_string(kAllOutcomes[j]));
        }
    }

    if (keep_rows.size() < 2 || keep_cols.size() < 2) {
        throw AnalysisError(
            "contingency table is degenerate after dropping empty rows/columns (" +
            std::to_string(keep_rows.size()) + " row(s), " + std::to_string(keep_cols.size()) +
            " column(s) remain)");
    }

    res.rows_used = keep_rows.size();
    res.cols_used = keep_cols.size();

    double n = 0.0;
    std::vector<double> rt;
    for (std::size_t i : keep_rows) {
        rt.push_back(row_tot[i]);
        n += row_tot[i];
    }
    std::vector<double> ct;
    for (std::size_t j : keep_cols) ct.push_back(col_tot_all[j]);

    res.n = n;
    res.expected.assign(keep_rows.size(), std::vector<double>(keep_cols.size(), 0.0));

    double chi2 = 0.0;
    for (std::size_t i = 0; i < keep_rows.size(); ++i) {
        for (std::size_t j = 0; j < keep_cols.size(); ++j) {
            const double expected = rt[i] * ct[j] / n;
            res.expected[i][j] = expected;
            if (expected < 5.0) res.low_expected_warning = true;
            const double observed = table.counts[keep_rows[i]][keep_cols[j]];
            const double diff = observed - expected;
            chi2 += diff * diff / expected;
        }
    }

    res.chi2 = chi2;
    res.df = static_cast<double>((keep_rows.size() - 1) * (keep_cols.size() - 1));
    res.p_value = chi_square_sf(chi2, res.df);
    res.cramers_v = cramers_v(chi2, n, keep_rows.size(), keep_cols.size());
    return res;
}

double cramers_v(double chi2, double n, std::size_t rows, std::size_t cols) {
    if (rows < 2 || cols < 2) throw AnalysisError("cramers_v requires at least a 2x2 table");
    if (!(n > 0.0)) throw AnalysisError("cramers_v requires a positive sample size");
    const double k = static_cast<double>(std::min(rows, cols) - 1);
    return std::sqrt(chi2 / (n * k));
}

}  // namespace rbeval::stats
