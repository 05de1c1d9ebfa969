#pragma once

#include <string>
#include <vector>

#include "rbeval/domain.hpp"

namespace rbeval::stats {

// Rows are levels of a grouping factor, columns are the three outcomes.
struct ContingencyTable {
    std::string row_factor;
    std::vector<std::string> row_labels;
    std::vector<std::array<double, kOutcomeCount>> counts;

    double total() const;
    std::vector<double> row_totals() const;
    std::array<double, kOutcomeCount> column_totals() const;
};

enum class GroupBy { Family, ArtifactType, ModelId };

// Builds a table over coded records. Family and artifact tables carry every
// enum level (possibly with zero rows); model tables carry the observed model
// ids in sorted order.
ContingencyTable build_contingency(const std::vector<RunRecord>& records, GroupBy by);

struct ChiSquareResult {
    double chi2 = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    double cramers_v = 0.0;
    double n = 0.0;
    std::size_t rows_used = 0;
    std::size_t cols_used = 0;
    std::vector<std::string> dropped_rows;
    std::vector<std::string> dropped_cols;
    bool low_expected_warning = false;  // any expected cell below 5
    std::vector<std::vector<double>> expected;
};

// Pearson chi-square test of independence. All-zero rows and columns are
// dropped with a note; a table with fewer than two non-zero rows or columns
// is degenerate and throws.
ChiSquareResult chi_square_test(const ContingencyTable& table);

double cramers_v(double chi2, double n, std::size_t rows, std::size_t cols);

}  // namespace rbeval::stats
