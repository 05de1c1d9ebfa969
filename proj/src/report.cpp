#include "rbeval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "rbeval/domain.hpp"
#include "rbeval/errors.hpp"

namespace rbeval {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string fmt_p(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", p);
    return buf;
}

const ordered_json* get(const ordered_json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double num_or(const ordered_json& j, double fallback) {
    return j.is_number() ? j.get<double>() : fallback;
}

std::string text_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kOutcomeColors[kOutcomeCount] = {"#4878a8", "#e8a33d", "#c0504d"};
const char* kModelColors[] = {"#4878a8", "#6aa84f", "#c0504d", "#8064a2", "#e8a33d", "#777777"};
constexpr std::size_t kModelColorCount = sizeof(kModelColors) / sizeof(kModelColors[0]);

struct Svg {
    std::ostringstream body;
    double width;
    double height;

    Svg(double w, double h) : width(w), height(h) {
        body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w, 0)
             << "\" height=\"" << fmt(h, 0) << "\" viewBox=\"0 0 " << fmt(w, 0) << " "
             << fmt(h, 0) << "\">\n";
        body << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w, 0) << "\" height=\"" << fmt(h, 0)
             << "\" fill=\"#ffffff\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        if (h < 0.0) h = 0.0;
        body << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
             << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2) {
        body << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
             << "\" y2=\"" << fmt(y2) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        body << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
             << text_escape(s) << "</text>\n";
    }

    std::string finish() {
        body << "</svg>\n";
        return body.str();
    }
};

std::string placeholder_svg(const std::string& message) {
    Svg svg(640, 120);
    svg.text(320, 64, message, 14, "middle");
    return svg.finish();
}

struct ModelView {
    std::string model_id;
    const ordered_json* node;
};

std::vector<ModelView> model_views(const ordered_json& report) {
    std::vector<ModelView> out;
    const ordered_json* models = get(report, "models");
    if (!models || !models->is_array()) return out;
    for (const auto& m : *models) {
        const ordered_json* id = get(m, "model_id");
        if (!id || !id->is_string()) continue;
        out.push_back({id->get<std::string>(), &m});
    }
    return out;
}

std::string render_outcome_rates_svg(const std::vector<ModelView>& models,
                                     std::vector<std::string>& warnings) {
    std::vector<std::pair<std::string, std::array<double, kOutcomeCount>>> data;
    for (const auto& mv : models) {
        const ordered_json* desc = get(*mv.node, "descriptive");
        const ordered_json* outcomes = desc ? get(*desc, "outcomes") : nullptr;
        if (!outcomes) continue;
        std::array<double, kOutcomeCount> pct{};
        for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            const ordered_json* cell = get(*outcomes, to_string(kAllOutcomes[i]).data());
            const ordered_json* p = cell ? get(*cell, "pct") : nullptr;
            pct[i] = p ? num_or(*p, 0.0) : 0.0;
        }
        data.push_back({mv.model_id, pct});
    }
    if (data.empty()) {
        warnings.push_back("outcome-rate chart: no descriptive sections available");
        return placeholder_svg("Outcome rates: not available");
    }

    const double bar_w = 90.0;
    const double gap = 70.0;
    const double left = 70.0;
    const double top = 60.0;
    const double plot_h = 240.0;
    const double width =
        std::max(640.0, left + data.size() * (bar_w + gap) + 40.0);
    Svg svg(width, top + plot_h + 70.0);
    svg.text(width / 2.0, 28.0, "Outcome shares per model (%)", 15, "middle");

    for (std::size_t i = 0; i < kOutcomeCount; ++i) {
        const double lx = left + static_cast<double>(i) * 150.0;
        svg.rect(lx, 38.0, 12.0, 12.0, kOutcomeColors[i]);
        svg.text(lx + 18.0, 48.0, std::string(display_name(kAllOutcomes[i])), 11);
    }

    svg.line(left - 10.0, top, left - 10.0, top + plot_h);
    for (int tick = 0; tick <= 100; tick += 25) {
        const double y = top + plot_h * (1.0 - tick / 100.0);
        svg.line(left - 14.0, y, left - 10.0, y);
        svg.text(left - 18.0, y + 4.0, std::to_string(tick), 10, "end");
    }

    for (std::size_t m = 0; m < data.size(); ++m) {
        const double x = left + static_cast<double>(m) * (bar_w + gap);
        double y = top + plot_h;
        for (std::size_t i = 0; i < kOutcomeCount; ++i) {
            const double h = plot_h * data[m].second[i] / 100.0;
            y -= h;
            svg.rect(x, y, bar_w, h, kOutcomeColors[i]);
        }
        svg.text(x + bar_w / 2.0, top + plot_h + 18.0, data[m].first, 11, "middle");
        svg.text(x + bar_w / 2.0, top + plot_h + 34.0,
                 fmt(data[m].second[0]) + "% refusal", 10, "middle");
    }
    return svg.finish();
}

std::string render_flip_rates_svg(const std::vector<ModelView>& models,
                                  std::vector<std::string>& warnings) {
    std::vector<std::string> levels;
    for (Artifact a : kAllArtifacts) levels.emplace_back(to_string(a));

    struct Series {
        std::string model_id;
        std::map<std::string, double> flip_pct;
    };
    std::vector<Series> series;
    for (const auto& mv : models) {
        const ordered_json* rbe = get(*mv.node, "rbe");
        const ordered_json* strat = rbe ? get(*rbe, "stratified") : nullptr;
        const ordered_json* arts = strat ? get(*strat, "artifact_type") : nullptr;
        if (!arts || !arts->is_array()) continue;
        Series s;
        s.model_id = mv.model_id;
        for (const auto& row : *arts) {
            const ordered_json* level = get(row, "level");
            const ordered_json* flip = get(row, "flip_rate_pct");
            if (level && level->is_string() && flip) {
                s.flip_pct[level->get<std::string>()] = num_or(*flip, 0.0);
            }
        }
        series.push_back(std::move(s));
    }
    if (series.empty()) {
        warnings.push_back("flip-rate chart: no stratified entropy sections available");
        return placeholder_svg("Flip rates by artifact type: not available");
    }

    double max_pct = 0.0;
    for (const auto& s : series)
        for (const auto& [_, v] : s.flip_pct) max_pct = std::max(max_pct, v);
    double scale_max = 5.0 * std::ceil(std::max(max_pct, 1.0) / 5.0);

    const double bar_w = 34.0;
    const double group_gap = 46.0;
    const double left = 70.0;
    const double top = 62.0;
    const double plot_h = 240.0;
    const double group_w = series.size() * bar_w + group_gap;
    const double width = std::max(640.0, left + levels.size() * group_w + 30.0);
    Svg svg(width, top + plot_h + 80.0);
    svg.text(width / 2.0, 28.0, "Refusal flip rate by artifact type (%)", 15, "middle");

    for (std::size_t m = 0; m < series.size(); ++m) {
        const double lx = left + static_cast<double>(m) * 200.0;
        svg.rect(lx, 38.0, 12.0, 12.0, kModelColors[m % kModelColorCount]);
        svg.text(lx + 18.0, 48.0, series[m].model_id, 11);
    }

    svg.line(left - 10.0, top, left - 10.0, top + plot_h);
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = scale_max * tick / 4.0;
        const double y = top + plot_h * (1.0 - static_cast<double>(tick) / 4.0);
        svg.line(left - 14.0, y, left - 10.0, y);
        svg.text(left - 18.0, y + 4.0, fmt(v, 1), 10, "end");
    }

    for (std::size_t g = 0; g < levels.size(); ++g) {
        const double gx = left + static_cast<double>(g) * group_w;
        for (std::size_t m = 0; m < series.size(); ++m) {
            double v = 0.0;
            auto it = series[m].flip_pct.find(levels[g]);
            if (it != series[m].flip_pct.end()) v = it->second;
            const double h = plot_h * v / scale_max;
            const double x = gx + static_cast<double>(m) * bar_w;
            svg.rect(x, top + plot_h - h, bar_w - 4.0, h,
                     kModelColors[m % kModelColorCount]);
            svg.text(x + (bar_w - 4.0) / 2.0, top + plot_h - h - 4.0, fmt(v, 1), 9,
                     "middle");
        }
        svg.text(gx + (series.size() * bar_w) / 2.0, top + plot_h + 18.0, levels[g], 10,
                 "middle");
    }
    return svg.finish();
}

std::string render_rbe_svg(const std::vector<ModelView>& models,
                           std::vector<std::string>& warnings) {
    struct Entry {
        std::string model_id;
        double bits;
        double normalized;
    };
    std::vector<Entry> data;
    for (const auto& mv : models) {
        const ordered_json* rbe = get(*mv.node, "rbe");
        const ordered_json* pooled = rbe ? get(*rbe, "pooled") : nullptr;
        const ordered_json* bits = pooled ? get(*pooled, "bits") : nullptr;
        const ordered_json* norm = pooled ? get(*pooled, "normalized") : nullptr;
        if (!bits) continue;
        data.push_back({mv.model_id, num_or(*bits, 0.0), norm ? num_or(*norm, 0.0) : 0.0});
    }
    if (data.empty()) {
        warnings.push_back("entropy chart: no pooled entropy sections available");
        return placeholder_svg("Refusal boundary entropy: not available");
    }

    const double full_scale = std::log2(3.0);
    const double bar_w = 110.0;
    const double gap = 80.0;
    const double left = 80.0;
    const double top = 56.0;
    const double plot_h = 240.0;
    const double width = std::max(640.0, left + data.size() * (bar_w + gap) + 40.0);
    Svg svg(width, top + plot_h + 80.0);
    svg.text(width / 2.0, 28.0, "Pooled refusal boundary entropy (bits)", 15, "middle");

    svg.line(left - 10.0, top, left - 10.0, top + plot_h);
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = full_scale * tick / 4.0;
        const double y = top + plot_h * (1.0 - static_cast<double>(tick) / 4.0);
        svg.line(left - 14.0, y, left - 10.0, y);
        svg.text(left - 18.0, y + 4.0, fmt(v, 2), 10, "end");
    }
    svg.text(left - 10.0, top - 8.0, "max = log2(3) = " + fmt(full_scale, 3), 10);

    for (std::size_t m = 0; m < data.size(); ++m) {
        const double x = left + static_cast<double>(m) * (bar_w + gap);
        const double h = plot_h * data[m].bits / full_scale;
        svg.rect(x, top + plot_h - h, bar_w, h, kModelColors[m % kModelColorCount]);
        svg.text(x + bar_w / 2.0, top + plot_h - h - 6.0,
                 fmt(data[m].bits, 3) + " (" + fmt(data[m].normalized, 3) + " norm)", 10,
                 "middle");
        svg.text(x + bar_w / 2.0, top + plot_h + 18.0, data[m].model_id, 11, "middle");
    }
    return svg.finish();
}

void coefficient_table(std::ostringstream& md, const ordered_json& fit) {
    const ordered_json* eqs = get(fit, "equations");
    if (!eqs || !eqs->is_array()) return;
    for (const auto& eq : *eqs) {
        const ordered_json* label = get(eq, "label");
        if (eqs->size() > 1 && label) {
            md << "\nEquation: `" << label->get<std::string>() << "`\n";
        }
        md << "\n| Term | Estimate | SE | Odds ratio | 95% CI | Flags |\n";
        md << "|---|---|---|---|---|---|\n";
        const ordered_json* coefs = get(eq, "coefficients");
        if (!coefs || !coefs->is_array()) continue;
        for (const auto& c : *coefs) {
            const ordered_json* name = get(c, "name");
            const ordered_json* est = get(c, "estimate");
            const ordered_json* se_r = get(c, "se_robust");
            const ordered_json* se = se_r ? se_r : get(c, "se");
            const ordered_json* qi = get(c, "quasi_infinite");
            const bool quasi = qi && qi->is_boolean() && qi->get<bool>();
            md << "| `" << (name ? name->get<std::string>() : "?") << "` | ";
            md << (est && est->is_number() ? fmt(est->get<double>(), 4) : "n/a") << " | ";
            md << (se && se->is_number() ? fmt(se->get<double>(), 4) : "n/a") << " | ";
            if (quasi) {
                const ordered_json* sign = get(c, "sign");
                const bool neg = sign && sign->is_number() && sign->get<double>() < 0.0;
                md << "n/a | n/a | quasi-infinite " << (neg ? "negative" : "positive")
                   << " |\n";
            } else {
                const ordered_json* orat = get(c, "odds_ratio");
                const ordered_json* lo = get(c, "ci_lo");
                const ordered_json* hi = get(c, "ci_hi");
                md << (orat && orat->is_number() ? fmt(orat->get<double>(), 3) : "n/a")
                   << " | ";
                if (lo && hi && lo->is_number() && hi->is_number()) {
                    md << "[" << fmt(lo->get<double>(), 3) << ", "
                       << fmt(hi->get<double>(), 3) << "]";
                } else {
                    md << "n/a";
                }
                md << " |  |\n";
            }
        }
    }
    const ordered_json* n_clusters = get(fit, "n_clusters");
    const ordered_json* converged = get(fit, "converged");
    const ordered_json* ll = get(fit, "log_likelihood");
    md << "\n";
    if (ll && ll->is_number()) md << "Log-likelihood: " << fmt(ll->get<double>(), 4) << ". ";
    if (converged && converged->is_boolean()) {
        md << (converged->get<bool>() ? "Converged." : "Did not converge.");
    }
    if (n_clusters && n_clusters->is_number()) {
        md << " Clusters: " << n_clusters->get<std::size_t>() << ".";
    }
    md << "\n";
    const ordered_json* notes = get(fit, "notes");
    if (notes && notes->is_array()) {
        for (const auto& note : *notes) {
            if (note.is_string()) md << "\n> Note: " << note.get<std::string>() << "\n";
        }
    }
    const ordered_json* unobserved = get(fit, "unobserved_categories");
    if (unobserved && unobserved->is_array() && !unobserved->empty()) {
        md << "\n> Unobserved outcome categories:";
        for (const auto& u : *unobserved) {
            if (u.is_string()) md << " " << u.get<std::string>();
        }
        md << "\n";
    }
}

void fit_section(std::ostringstream& md, const ordered_json& model, const char* key,
                 const std::string& title, std::vector<std::string>& warnings,
                 const std::string& model_id) {
    md << "### " << title << "\n";
    const ordered_json* fit = get(model, key);
    if (!fit) {
        md << "\n> " << title << ": not available.\n\n";
        warnings.push_back("model " + model_id + ": missing section '" + key + "'");
        return;
    }
    const ordered_json* notice = get(*fit, "notice");
    if (notice && notice->is_string()) {
        md << "\n> Skipped: " << notice->get<std::string>() << "\n\n";
        return;
    }
    coefficient_table(md, *fit);
    md << "\n";
}

void model_markdown(std::ostringstream& md, const ordered_json& model,
                    std::vector<std::string>& warnings) {
    const ordered_json* idj = get(model, "model_id");
    const std::string model_id = idj && idj->is_string() ? idj->get<std::string>() : "?";
    md << "## Model: " << model_id << "\n\n";

    const ordered_json* desc = get(model, "descriptive");
    md << "### Outcome distribution\n\n";
    if (desc) {
        const ordered_json* outcomes = get(*desc, "outcomes");
        const ordered_json* n_runs = get(*desc, "n_runs");
        const ordered_json* n_bases = get(*desc, "n_base_prompts");
        if (n_runs && n_bases) {
            md << "Coded runs: " << n_runs->dump() << " over " << n_bases->dump()
               << " base prompts.\n\n";
        }
        if (outcomes) {
            md << "| Outcome | Count | Percent |\n|---|---|---|\n";
            for (Outcome o : kAllOutcomes) {
                const ordered_json* cell = get(*outcomes, to_string(o).data());
                if (!cell) continue;
                const ordered_json* count = get(*cell, "count");
                const ordered_json* pct = get(*cell, "pct");
                md << "| " << display_name(o) << " | " << (count ? count->dump() : "n/a")
                   << " | " << (pct && pct->is_number() ? fmt(pct->get<double>(), 2) : "n/a")
                   << " |\n";
            }
        }
        const ordered_json* flip = get(*desc, "flip_rate_pct");
        if (flip && flip->is_number()) {
            md << "\nAny-compliance (flip) rate: " << fmt(flip->get<double>(), 2) << "%\n";
        }
    } else {
        md << "> Descriptive table: not available.\n";
        warnings.push_back("model " + model_id + ": missing section 'descriptive'");
    }
    md << "\n";

    md << "### Family x outcome independence\n\n";
    const ordered_json* famtab = get(model, "family_outcome_table");
    if (famtab) {
        const ordered_json* rows = get(*famtab, "rows");
        if (rows && rows->is_array()) {
            md << "| Family | Refusal | Partial | Full |\n|---|---|---|---|\n";
            for (const auto& row : *rows) {
                const ordered_json* level = get(row, "level");
                md << "| " << (level && level->is_string() ? level->get<std::string>() : "?");
                for (Outcome o : kAllOutcomes) {
                    const ordered_json* c = get(row, to_string(o).data());
                    md << " | " << (c ? c->dump() : "0");
                }
                md << " |\n";
            }
            md << "\n";
        }
    }
    const ordered_json* chi = get(model, "family_chi_square");
    if (chi) {
        const ordered_json* notice = get(*chi, "notice");
        if (notice && notice->is_string()) {
            md << "> Chi-square skipped: " << notice->get<std::string>() << "\n";
        } else {
            const ordered_json* chi2 = get(*chi, "chi2");
            const ordered_json* df = get(*chi, "df");
            const ordered_json* p = get(*chi, "p_value");
            const ordered_json* v = get(*chi, "cramers_v");
            md << "chi2(" << (df && df->is_number() ? fmt(df->get<double>(), 0) : "?")
               << ") = " << (chi2 && chi2->is_number() ? fmt(chi2->get<double>(), 2) : "n/a")
               << ", p = " << (p && p->is_number() ? fmt_p(p->get<double>()) : "n/a")
               << ", Cramer's V = "
               << (v && v->is_number() ? fmt(v->get<double>(), 3) : "n/a") << "\n";
            const ordered_json* low = get(*chi, "low_expected_warning");
            if (low && low->is_boolean() && low->get<bool>()) {
                md << "\n> Warning: at least one expected cell count is below 5.\n";
            }
            const ordered_json* dropped = get(*chi, "dropped_rows");
            if (dropped && dropped->is_array() && !dropped->empty()) {
                md << "\n> Dropped empty rows:";
                for (const auto& d : *dropped) md << " " << d.get<std::string>();
                md << "\n";
            }
        }
    } else {
        md << "> Chi-square: not available.\n";
        warnings.push_back("model " + model_id + ": missing section 'family_chi_square'");
    }
    md << "\n";

    fit_section(md, model, "logistic_flip", "Logistic regression: refusal flips", warnings,
                model_id);
    fit_section(md, model, "logistic_full_vs_rest",
                "Logistic regression: full compliance vs rest", warnings, model_id);
    fit_section(md, model, "multinomial_by_artifact",
                "Multinomial outcome model by artifact type (baseline: refusal)", warnings,
                model_id);
    fit_section(md, model, "gee_flip", "GEE for refusal flips (clustered on base prompt)",
                warnings, model_id);

    md << "### Separation\n\n";
    const ordered_json* sep = get(model, "separation");
    if (sep && sep->is_array()) {
        if (sep->empty()) {
            md << "No constant-outcome strata detected.\n";
        } else {
            for (const auto& s : *sep) {
                const ordered_json* factor = get(s, "factor");
                const ordered_json* level = get(s, "level");
                const ordered_json* outcome = get(s, "constant_outcome");
                const ordered_json* n = get(s, "n");
                const ordered_json* small = get(s, "small_stratum");
                md << "- `" << (factor ? factor->get<std::string>() : "?") << " = "
                   << (level ? level->get<std::string>() : "?") << "`: all "
                   << (n ? n->dump() : "?") << " outcomes are "
                   << (outcome ? outcome->get<std::string>() : "?");
                if (small && small->is_boolean() && small->get<bool>()) {
                    md << " (single observation)";
                }
                md << "\n";
            }
        }
    } else {
        md << "> Separation scan: not available.\n";
        warnings.push_back("model " + model_id + ": missing section 'separation'");
    }
    md << "\n";

    md << "### Refusal boundary entropy\n\n";
    const ordered_json* rbe = get(model, "rbe");
    if (rbe) {
        const ordered_json* pooled = get(*rbe, "pooled");
        if (pooled) {
            const ordered_json* bits = get(*pooled, "bits");
            const ordered_json* norm = get(*pooled, "normalized");
            md << "Pooled: "
               << (bits && bits->is_number() ? fmt(bits->get<double>(), 3) : "n/a")
               << " bits ("
               << (norm && norm->is_number() ? fmt(norm->get<double>(), 3) : "n/a")
               << " normalized)\n\n";
        }
        const ordered_json* agg = get(*rbe, "neighborhoods");
        if (agg) {
            md << "| Neighborhood statistic | Value |\n|---|---|\n";
            const std::pair<const char*, const char*> stats_rows[] = {
                {"n_neighborhoods", "Neighborhoods"},
                {"median_bits", "Median RBE (bits)"},
                {"mean_bits", "Mean RBE (bits)"},
                {"max_bits", "Max RBE (bits)"},
                {"escaped_pct", "Escaped (%)"},
            };
            for (const auto& [key, label] : stats_rows) {
                const ordered_json* v = get(*agg, key);
                if (!v) continue;
                md << "| " << label << " | "
                   << (v->is_number_integer() || v->is_number_unsigned()
                           ? v->dump()
                           : fmt(num_or(*v, 0.0), 3))
                   << " |\n";
            }
            md << "\n";
        }
        const ordered_json* strat = get(*rbe, "stratified");
        for (const char* factor : {"family", "artifact_type"}) {
            const ordered_json* rows = strat ? get(*strat, factor) : nullptr;
            if (!rows || !rows->is_array()) continue;
            md << "Stratified by " << factor
               << ":\n\n| Level | n | Flip (%) | Partial (%) | Full (%) | RBE (bits) |\n"
               << "|---|---|---|---|---|---|\n";
            for (const auto& row : *rows) {
                const ordered_json* level = get(row, "level");
                const ordered_json* n = get(row, "n");
                const ordered_json* flip = get(row, "flip_rate_pct");
                const ordered_json* partial = get(row, "partial_pct");
                const ordered_json* full = get(row, "full_pct");
                const ordered_json* bits = get(row, "rbe_bits");
                md << "| " << (level && level->is_string() ? level->get<std::string>() : "?")
                   << " | " << (n ? n->dump() : "?") << " | "
                   << (flip && flip->is_number() ? fmt(flip->get<double>(), 1) : "n/a")
                   << " | "
                   << (partial && partial->is_number() ? fmt(partial->get<double>(), 1)
                                                       : "n/a")
                   << " | "
                   << (full && full->is_number() ? fmt(full->get<double>(), 1) : "n/a")
                   << " | "
                   << (bits && bits->is_number() ? fmt(bits->get<double>(), 3) : "n/a")
                   << " |\n";
            }
            md << "\n";
        }
    } else {
        md << "> Entropy summary: not available.\n\n";
        warnings.push_back("model " + model_id + ": missing section 'rbe'");
    }

    md << "### Fragile prompts\n\n";
    const ordered_json* fragile = get(model, "fragile_prompts");
    if (fragile && fragile->is_array()) {
        if (fragile->empty()) {
            md << "No neighborhood escaped refusal.\n";
        } else {
            md << "| Base prompt | RBE (bits) | Flip (%) | Refusal | Partial | Full |\n"
               << "|---|---|---|---|---|---|\n";
            for (const auto& row : *fragile) {
                const ordered_json* base = get(row, "base_prompt_id");
                const ordered_json* bits = get(row, "rbe_bits");
                const ordered_json* flip = get(row, "flip_rate_pct");
                const ordered_json* outcomes = get(row, "outcomes");
                md << "| `" << (base && base->is_string() ? base->get<std::string>() : "?")
                   << "` | "
                   << (bits && bits->is_number() ? fmt(bits->get<double>(), 3) : "n/a")
                   << " | "
                   << (flip && flip->is_number() ? fmt(flip->get<double>(), 1) : "n/a");
                for (Outcome o : kAllOutcomes) {
                    const ordered_json* cell =
                        outcomes ? get(*outcomes, to_string(o).data()) : nullptr;
                    const ordered_json* count = cell ? get(*cell, "count") : nullptr;
                    md << " | " << (count ? count->dump() : "?");
                }
                md << " |\n";
            }
        }
    } else {
        md << "> Fragile-prompt list: not available.\n";
        warnings.push_back("model " + model_id + ": missing section 'fragile_prompts'");
    }
    md << "\n";
}

}  // namespace

RenderedReport render_report(const nlohmann::ordered_json& report) {
    if (!report.is_object()) {
        throw ValidationError("report document must be a JSON object");
    }
    RenderedReport out;
    const std::vector<ModelView> models = model_views(report);

    std::ostringstream md;
    md << "# Refusal stability report\n\n";
    const ordered_json* n_records = get(report, "n_records");
    const ordered_json* n_valid = get(report, "n_valid");
    const ordered_json* n_invalid = get(report, "n_excluded_invalid");
    if (n_records && n_valid && n_invalid) {
        md << "Records: " << n_records->dump() << " total, " << n_valid->dump()
           << " valid, " << n_invalid->dump() << " excluded as invalid.\n\n";
    }
    if (models.empty()) {
        md << "> No model sections present in the report document.\n";
        out.warnings.push_back("report has no model sections");
    }
    for (const auto& mv : models) model_markdown(md, *mv.node, out.warnings);

    out.outcome_rates_svg = render_outcome_rates_svg(models, out.warnings);
    out.flip_rates_svg = render_flip_rates_svg(models, out.warnings);
    out.rbe_svg = render_rbe_svg(models, out.warnings);

    if (!out.warnings.empty()) {
        md << "## Render warnings\n\n";
        for (const auto& w : out.warnings) md << "- " << w << "\n";
    }
    out.markdown = md.str();
    return out;
}

}  // namespace rbeval
