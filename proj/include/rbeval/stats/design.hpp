#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbeval/domain.hpp"

namespace rbeval::stats {

enum class Predictor { Family, ArtifactType };

struct FactorInfo {
    std::string name;
    std::vector<std::string> levels;    // observed levels in canonical order
    std::size_t reference = 0;          // index into levels
    std::vector<std::size_t> codes;     // per row, index into levels
};

// Dummy-coded design with an intercept in column 0. The reference level of
// each factor is the most frequent one; ties fall back to canonical order.
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> col_names;
    std::vector<FactorInfo> factors;
    std::vector<int> y_flip;                // outcome moved off refusal
    std::vector<int> y_full;                // outcome is full compliance
    std::vector<int> y3;                    // 0 refusal, 1 partial, 2 full
    std::vector<std::string> cluster_ids;   // base prompt id per row

    std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

// reference_overrides maps a factor name to the level to use as reference
// instead of the most frequent one; an unobserved level is an error.
DesignMatrix encode_factors(const std::vector<RunRecord>& records,
                            const std::vector<Predictor>& predictors,
                            const std::map<std::string, std::string>& reference_overrides = {});

struct SeparationNote {
    std::string factor;
    std::string level;
    std::size_t n = 0;
    std::string detail;
};

struct SeparationScan {
    std::vector<SeparationNote> constant_strata;
    std::vector<SeparationNote> small_strata;
    bool any() const { return !constant_strata.empty(); }
};

// Flags factor levels whose observed response is constant (a quasi-separation
// candidate) and levels observed only once.
SeparationScan scan_separation(const DesignMatrix& dm, const std::vector<int>& y);

struct StratumSeparation {
    std::string factor;
    std::string level;
    Outcome constant_outcome = Outcome::Refusal;
    std::size_t n = 0;
    bool small_stratum = false;  // a single observation, constant by definition
};

// Levels of the factor whose three-category outcome is constant across all
// coded records.
std::vector<StratumSeparation> detect_separation(const std::vector<RunRecord>& records,
                                                 Predictor factor);

}  // namespace rbeval::stats
