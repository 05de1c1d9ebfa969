#include "rbeval/stats/design.hpp"

#include <algorithm>
#include <map>

#include "rbeval/errors.hpp"

namespace rbeval::stats {

namespace {

std::string predictor_name(Predictor p) {
    return p == Predictor::Family ? "family" : "artifact_type";
}

std::string level_of(const RunRecord& r, Predictor p) {
    return p == Predictor::Family ? std::string(to_string(r.family))
                                  : std::string(to_string(r.artifact_type));
}

std::vector<std::string> canonical_levels(Predictor p) {
    std::vector<std::string> out;
    if (p == Predictor::Family) {
        for (Family f : kAllFamilies) out.emplace_back(to_string(f));
    } else {
        for (Artifact a : kAllArtifacts) out.emplace_back(to_string(a));
    }
    return out;
}

}  // namespace

DesignMatrix encode_factors(const std::vector<RunRecord>& records,
                            const std::vector<Predictor>& predictors,
                            const std::map<std::string, std::string>& reference_overrides) {
    std::vector<const RunRecord*> rows;
    for (const auto& r : records) {
        if (r.analyzable()) rows.push_back(&r);
    }
    if (rows.empty()) throw AnalysisError("no coded records to build a design matrix from");

    DesignMatrix dm;
    dm.col_names.emplace_back("(intercept)");

    for (Predictor p : predictors) {
        FactorInfo info;
        info.name = predictor_name(p);

        std::map<std::string, std::size_t> freq;
        for (const RunRecord* r : rows) ++freq[level_of(*r, p)];

        for (const std::string& level : canonical_levels(p)) {
            if (freq.count(level)) info.levels.push_back(level);
        }
        if (info.levels.size() < 2) {
            throw AnalysisError("factor '" + info.name +
                                "' has fewer than two observed levels");
        }

        auto override_it = reference_overrides.find(info.name);
        if (override_it != reference_overrides.end()) {
            auto lvl =
                std::find(info.levels.begin(), info.levels.end(), override_it->second);
            if (lvl == info.levels.end()) {
                throw AnalysisError("requested reference level '" + override_it->second +
                                    "' for factor '" + info.name + "' is not observed");
            }
            info.reference = static_cast<std::size_t>(lvl - info.levels.begin());
        } else {
            std::size_t best = 0;
            for (std::size_t i = 1; i < info.levels.size(); ++i) {
                if (freq[info.levels[i]] > freq[info.levels[best]]) best = i;
            }
            info.reference = best;
        }

        std::map<std::string, std::size_t> level_index;
        for (std::size_t i = 0; i < info.levels.size(); ++i) level_index[info.levels[i]] = i;
        info.codes.reserve(rows.size());
        for (const RunRecord* r : rows) info.codes.push_back(level_index.at(level_of(*r, p)));

        for (std::size_t i = 0; i < info.levels.size(); ++i) {
            if (i == info.reference) continue;
            dm.col_names.push_back(info.name + ":" + info.levels[i]);
        }
        dm.factors.push_back(std::move(info));
    }

    dm.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                 static_cast<Eigen::Index>(dm.col_names.size()));
    dm.X.col(0).setOnes();

    Eigen::Index col = 1;
    for (const FactorInfo& info : dm.factors) {
        std::map<std::size_t, Eigen::Index> level_col;
        for (std::size_t i = 0; i < info.levels.size(); ++i) {
            if (i == info.reference) continue;
            level_col[i] = col++;
        }
        for (std::size_t row = 0; row < rows.size(); ++row) {
            auto it = level_col.find(info.codes[row]);
            if (it != level_col.end()) dm.X(static_cast<Eigen::Index>(row), it->second) = 1.0;
        }
    }

    dm.y_flip.reserve(rows.size());
    dm.y_full.reserve(rows.size());
    dm.y3.reserve(rows.size());
    dm.cluster_ids.reserve(rows.size());
    for (const RunRecord* r : rows) {
        const Outcome o = *r->outcome;
        dm.y_flip.push_back(o == Outcome::Refusal ? 0 : 1);
        dm.y_full.push_back(o == Outcome::FullCompliance ? 1 : 0);
        dm.y3.push_back(static_cast<int>(o));
        dm.cluster_ids.push_back(r->base_id);
    }
    return dm;
}

SeparationScan scan_separation(const DesignMatrix& dm, const std::vector<int>& y) {
    if (y.size() != dm.n()) {
        throw AnalysisError("separation scan: response length does not match design rows");
    }
    SeparationScan scan;
    for (const FactorInfo& info : dm.factors) {
        for (std::size_t level = 0; level < info.levels.size(); ++level) {
            std::size_t n = 0;
            int first = -1;
            bool constant = true;
            for (std::size_t row = 0; row < info.codes.size(); ++row) {
                if (info.codes[row] != level) continue;
                if (n == 0) {
                    first = y[row];
                } else if (y[row] != first) {
                    constant = false;
                }
                ++n;
            }
            if (n == 0) continue;
            if (n == 1) {
                scan.small_strata.push_back({info.name, info.levels[level], n,
                                             "single observation in stratum"});
                continue;
            }
            if (constant) {
                scan.constant_strata.push_back(
                    {info.name, info.levels[level], n,
                     "all " + std::to_string(n) + " responses equal " + std::to_string(first)});
            }
        }
    }
    return scan;
}

std::vector<StratumSeparation> detect_separation(const std::vector<RunRecord>& records,
                                                 Predictor factor) {
    struct Acc {
        std::size_t n = 0;
        Outcome first = Outcome::Refusal;
        bool constant = true;
    };
    std::map<std::string, Acc> strata;
    for (const auto& r : records) {
        if (!r.analyzable()) continue;
        Acc& acc = strata[level_of(r, factor)];
        if (acc.n == 0) {
            acc.first = *r.outcome;
        } else if (*r.outcome != acc.first) {
            acc.constant = false;
        }
        ++acc.n;
    }

    std::vector<StratumSeparation> out;
    for (const std::string& level : canonical_levels(factor)) {
        auto it = strata.find(level);
        if (it == strata.end() || !it->second.constant) continue;
        StratumSeparation s;
        s.factor = predictor_name(factor);
        s.level = level;
        s.constant_outcome = it->second.first;
        s.n = it->second.n;
        s.small_stratum = it->second.n == 1;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace rbeval::stats
