#include "rbeval/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rbeval/coding.hpp"
#include "rbeval/errors.hpp"
#include "rbeval/metrics.hpp"
#include "rbeval/stats/contingency.hpp"
#include "rbeval/stats/design.hpp"
#include "rbeval/stats/glm.hpp"

namespace rbeval {

namespace {

using nlohmann::ordered_json;

ordered_json json_or_null(double v) {
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
}

ordered_json coefficient_to_json(const stats::Coefficient& c) {
    ordered_json j;
    j["name"] = c.name;
    j["estimate"] = json_or_null(c.estimate);
    j["se"] = json_or_null(c.se);
    if (c.has_robust) j["se_robust"] = json_or_null(c.se_robust);
    j["quasi_infinite"] = c.quasi_infinite;
    if (c.quasi_infinite) {
        j["sign"] = c.estimate < 0.0 ? -1 : 1;
        j["odds_ratio"] = nullptr;
        j["ci_lo"] = nullptr;
        j["ci_hi"] = nullptr;
    } else {
        j["odds_ratio"] = json_or_null(c.odds_ratio);
        j["ci_lo"] = json_or_null(c.ci_lo);
        j["ci_hi"] = json_or_null(c.ci_hi);
    }
    return j;
}

ordered_json fit_to_json(const stats::FitResult& fit) {
    ordered_json j;
    ordered_json eqs = ordered_json::array();
    for (const auto& eq : fit.equations) {
        ordered_json e;
        e["label"] = eq.label;
        ordered_json coefs = ordered_json::array();
        for (const auto& c : eq.coefficients) coefs.push_back(coefficient_to_json(c));
        e["coefficients"] = std::move(coefs);
        eqs.push_back(std::move(e));
    }
    j["equations"] = std::move(eqs);
    j["log_likelihood"] = json_or_null(fit.log_likelihood);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["any_quasi_infinite"] = fit.any_quasi_infinite;
    j["n_obs"] = fit.n_obs;
    if (fit.n_clusters > 0) j["n_clusters"] = fit.n_clusters;
    if (!fit.unobserved_categories.empty()) {
        j["unobserved_categories"] = fit.unobserved_categories;
    }
    if (!fit.notes.empty()) j["notes"] = fit.notes;
    return j;
}

ordered_json distribution_to_json(const OutcomeDistribution& dist) {
    const double n = static_cast<double>(dist.total());
    ordered_json j;
    for (Outcome o : kAllOutcomes) {
        ordered_json cell;
        cell["count"] = dist.count(o);
        cell["pct"] = n > 0.0 ? 100.0 * static_cast<double>(dist.count(o)) / n : 0.0;
        j[std::string(to_string(o))] = std::move(cell);
    }
    return j;
}

ordered_json chi_square_to_json(const stats::ChiSquareResult& res) {
    ordered_json j;
    j["chi2"] = res.chi2;
    j["df"] = res.df;
    j["p_value"] = res.p_value;
    j["cramers_v"] = res.cramers_v;
    j["n"] = res.n;
    j["rows_used"] = res.rows_used;
    j["cols_used"] = res.cols_used;
    if (!res.dropped_rows.empty()) j["dropped_rows"] = res.dropped_rows;
    if (!res.dropped_cols.empty()) j["dropped_cols"] = res.dropped_cols;
    j["low_expected_warning"] = res.low_expected_warning;
    return j;
}

ordered_json table_to_json(const stats::ContingencyTable& table) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < table.row_labels.size(); ++i) {
        ordered_json row;
        row["level"] = table.row_labels[i];
        for (std::size_t j = 0; j < kOutcomeCount; ++j) {
            row[std::string(to_string(kAllOutcomes[j]))] = table.counts[i][j];
        }
        rows.push_back(std::move(row));
    }
    ordered_json j;
    j["row_factor"] = table.row_factor;
    j["rows"] = std::move(rows);
    return j;
}

ordered_json stratified_to_json(const std::vector<StratumStability>& strata) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : strata) {
        ordered_json j;
        j["level"] = s.label;
        j["n"] = s.dist.total();
        j["flip_rate_pct"] = 100.0 * s.flip_rate;
        j["partial_pct"] = 100.0 * s.partial_rate;
        j["full_pct"] = 100.0 * s.full_rate;
        const RbeValue rbe = refusal_boundary_entropy(s.dist);
        j["rbe_bits"] = rbe.bits;
        j["rbe_normalized"] = rbe.normalized;
        arr.push_back(std::move(j));
    }
    return arr;
}

template <typename Fn>
ordered_json guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const AnalysisError& e) {
        ordered_json j;
        j["notice"] = e.what();
        return j;
    }
}

ordered_json analyze_one_model(const std::string& model_id,
                               const std::vector<RunRecord>& records) {
    ordered_json out;
    out["model_id"] = model_id;

    // Stage 1: descriptive counts.
    OutcomeDistribution pooled;
    std::set<std::string> bases;
    for (const auto& r : records) {
        pooled.add(*r.outcome);
        bases.insert(r.base_id);
    }
    {
        ordered_json desc;
        desc["n_runs"] = pooled.total();
        desc["n_base_prompts"] = bases.size();
        desc["outcomes"] = distribution_to_json(pooled);
        desc["flip_rate_pct"] = 100.0 * flip_rate(pooled);
        out["descriptive"] = std::move(desc);
    }

    // Stage 2: family x outcome independence.
    const stats::ContingencyTable family_table =
        stats::build_contingency(records, stats::GroupBy::Family);
    out["family_outcome_table"] = table_to_json(family_table);
    out["family_chi_square"] = guarded([&] {
        return chi_square_to_json(stats::chi_square_test(family_table));
    });

    // Stage 3: binary logistic fits for flips and for full compliance.
    std::vector<stats::Predictor> predictors;
    for (stats::Predictor p : {stats::Predictor::Family, stats::Predictor::ArtifactType}) {
        std::set<std::string> levels;
        for (const auto& r : records) {
            levels.insert(p == stats::Predictor::Family
                              ? std::string(to_string(r.family))
                              : std::string(to_string(r.artifact_type)));
        }
        if (levels.size() >= 2) predictors.push_back(p);
    }

    out["logistic_flip"] = guarded([&] {
        const stats::DesignMatrix dm = stats::encode_factors(records, predictors);
        return fit_to_json(stats::fit_binary_logistic(dm.X, dm.y_flip, dm.col_names, "flip"));
    });
    out["logistic_full_vs_rest"] = guarded([&] {
        const stats::DesignMatrix dm = stats::encode_factors(records, predictors);
        return fit_to_json(
            stats::fit_binary_logistic(dm.X, dm.y_full, dm.col_names, "full_vs_rest"));
    });

    // Stage 4: multinomial outcome model with artifact type as predictor.
    out["multinomial_by_artifact"] = guarded([&] {
        std::vector<stats::Predictor> artifact_only;
        for (stats::Predictor p : predictors) {
            if (p == stats::Predictor::ArtifactType) artifact_only.push_back(p);
        }
        if (artifact_only.empty()) {
            throw AnalysisError("artifact type has fewer than two observed levels");
        }
        const stats::DesignMatrix dm = stats::encode_factors(records, artifact_only);
        std::vector<std::string> categories;
        for (Outcome o : kAllOutcomes) categories.emplace_back(to_string(o));
        return fit_to_json(
            stats::fit_multinomial_logistic(dm.X, dm.y3, dm.col_names, categories));
    });

    // Stage 5: GEE for flips, clustered on base prompt.
    out["gee_flip"] = guarded([&] {
        const stats::DesignMatrix dm = stats::encode_factors(records, predictors);
        return fit_to_json(stats::fit_gee_binomial(dm.X, dm.y_flip, dm.cluster_ids,
                                                   dm.col_names, "flip"));
    });

    // Separation notices for both stratifying factors.
    {
        ordered_json notes = ordered_json::array();
        for (stats::Predictor p :
             {stats::Predictor::ArtifactType, stats::Predictor::Family}) {
            for (const auto& s : stats::detect_separation(records, p)) {
                ordered_json j;
                j["factor"] = s.factor;
                j["level"] = s.level;
                j["constant_outcome"] = std::string(to_string(s.constant_outcome));
                j["n"] = s.n;
                j["small_stratum"] = s.small_stratum;
                notes.push_back(std::move(j));
            }
        }
        out["separation"] = std::move(notes);
    }

    // Stage 6: entropy summaries.
    {
        ordered_json rbe;
        const RbeValue pooled_rbe = refusal_boundary_entropy(pooled);
        ordered_json pj;
        pj["bits"] = pooled_rbe.bits;
        pj["normalized"] = pooled_rbe.normalized;
        rbe["pooled"] = std::move(pj);

        const auto [summaries, agg] = per_neighborhood_rbe(records);
        ordered_json aj;
        aj["n_neighborhoods"] = agg.n_neighborhoods;
        aj["mean_bits"] = agg.mean_bits;
        aj["median_bits"] = agg.median_bits;
        aj["max_bits"] = agg.max_bits;
        aj["fraction_escaped"] = agg.fraction_escaped;
        aj["escaped_pct"] = 100.0 * agg.fraction_escaped;
        rbe["neighborhoods"] = std::move(aj);

        ordered_json strat;
        strat["family"] = stratified_to_json(stratified_stability(records, StratifyBy::Family));
        strat["artifact_type"] =
            stratified_to_json(stratified_stability(records, StratifyBy::ArtifactType));
        rbe["stratified"] = std::move(strat);
        out["rbe"] = std::move(rbe);

        // Stage 7: fragile prompts, the neighborhoods that escaped at least once.
        std::vector<const NeighborhoodSummary*> escaped;
        for (const auto& s : summaries) {
            if (s.escaped) escaped.push_back(&s);
        }
        std::sort(escaped.begin(), escaped.end(),
                  [](const NeighborhoodSummary* a, const NeighborhoodSummary* b) {
                      if (a->rbe.bits != b->rbe.bits) return a->rbe.bits > b->rbe.bits;
                      return a->base_id < b->base_id;
                  });
        ordered_json fragile = ordered_json::array();
        for (const NeighborhoodSummary* s : escaped) {
            ordered_json j;
            j["base_prompt_id"] = s->base_id;
            j["rbe_bits"] = s->rbe.bits;
            j["rbe_normalized"] = s->rbe.normalized;
            j["flip_rate_pct"] = 100.0 * s->flip_rate;
            j["outcomes"] = distribution_to_json(s->dist);
            fragile.push_back(std::move(j));
        }
        out["fragile_prompts"] = std::move(fragile);
    }

    return out;
}

}  // namespace

nlohmann::ordered_json analyze_records(const std::vector<RunRecord>& records) {
    if (records.empty()) throw AnalysisError("no records to analyze");

    const std::vector<std::string> uncoded = uncoded_run_ids(records);
    if (!uncoded.empty()) {
        std::string msg = "refusing to analyze: " + std::to_string(uncoded.size()) +
                          " valid record(s) are uncoded:";
        const std::size_t shown = std::min<std::size_t>(uncoded.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + uncoded[i];
        if (shown < uncoded.size()) {
            msg += "\n  ... and " + std::to_string(uncoded.size() - shown) + " more";
        }
        throw AnalysisError(msg);
    }

    std::map<std::string, std::vector<RunRecord>> by_model;
    std::size_t n_invalid = 0;
    for (const auto& r : records) {
        if (!r.valid) {
            ++n_invalid;
            continue;
        }
        by_model[r.model_id].push_back(r);
    }
    if (by_model.empty()) {
        throw AnalysisError("no valid records remain after exclusions");
    }

    ordered_json report;
    report["schema"] = "refusal-stability-report";
    report["schema_version"] = 1;
    report["n_records"] = records.size();
    report["n_valid"] = records.size() - n_invalid;
    report["n_excluded_invalid"] = n_invalid;

    ordered_json models = ordered_json::array();
    for (const auto& [model_id, model_records] : by_model) {
        models.push_back(analyze_one_model(model_id, model_records));
    }
    report["models"] = std::move(models);
    return report;
}

}  // namespace rbeval
