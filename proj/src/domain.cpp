#include "rbeval/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbeval/errors.hpp"

namespace rbeval {

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Refusal: return "refusal";
        case Outcome::PartialCompliance: return "partial";
        case Outcome::FullCompliance: return "full";
    }
    return "refusal";
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::RoleFraming: return "role_framing";
        case Family::MagnitudeScaling: return "magnitude_scaling";
        case Family::ConstraintInsertion: return "constraint_insertion";
        case Family::ConditionalFraming: return "conditional_framing";
        case Family::AbstractionPressure: return "abstraction_pressure";
    }
    return "role_framing";
}

std::string_view to_string(Artifact a) {
    switch (a) {
        case Artifact::RansomwareText: return "ransomware_text";
        case Artifact::KeyloggerCode: return "keylogger_code";
        case Artifact::MalwareCode: return "malware_code";
        case Artifact::OtherMixed: return "other_mixed";
    }
    return "other_mixed";
}

std::string_view display_name(Outcome o) {
    switch (o) {
        case Outcome::Refusal: return "Refusal";
        case Outcome::PartialCompliance: return "Partial Compliance";
        case Outcome::FullCompliance: return "Full Compliance";
    }
    return "Refusal";
}

std::string_view display_name(Family f) {
    switch (f) {
        case Family::RoleFraming: return "Role framing";
        case Family::MagnitudeScaling: return "Magnitude scaling";
        case Family::ConstraintInsertion: return "Constraint insertion";
        case Family::ConditionalFraming: return "Conditional framing";
        case Family::AbstractionPressure: return "Abstraction pressure";
    }
    return "Role framing";
}

std::string_view display_name(Artifact a) {
    switch (a) {
        case Artifact::RansomwareText: return "Ransomware text";
        case Artifact::KeyloggerCode: return "Keylogger code";
        case Artifact::MalwareCode: return "Malware code";
        case Artifact::OtherMixed: return "Other/mixed";
    }
    return "Other/mixed";
}

std::optional<Outcome> try_outcome_from_string(std::string_view s) {
    for (Outcome o : kAllOutcomes) {
        if (s == to_string(o)) return o;
    }
    return std::nullopt;
}

std::optional<Family> try_family_from_string(std::string_view s) {
    for (Family f : kAllFamilies) {
        if (s == to_string(f)) return f;
    }
    return std::nullopt;
}

std::optional<Artifact> try_artifact_from_string(std::string_view s) {
    for (Artifact a : kAllArtifacts) {
        if (s == to_string(a)) return a;
    }
    return std::nullopt;
}

Outcome outcome_from_string(std::string_view s) {
    if (auto o = try_outcome_from_string(s)) return *o;
    throw ValidationError("unknown outcome name: '" + std::string(s) + "'");
}

Family family_from_string(std::string_view s) {
    if (auto f = try_family_from_string(s)) return *f;
    throw ValidationError("unknown perturbation family name: '" + std::string(s) + "'");
}

Artifact artifact_from_string(std::string_view s) {
    if (auto a = try_artifact_from_string(s)) return *a;
    throw ValidationError("unknown artifact type name: '" + std::string(s) + "'");
}

long OutcomeDistribution::count(Outcome o) const {
    switch (o) {
        case Outcome::Refusal: return n_refusal;
        case Outcome::PartialCompliance: return n_partial;
        case Outcome::FullCompliance: return n_full;
    }
    return 0;
}

void OutcomeDistribution::add(Outcome o, long k) {
    switch (o) {
        case Outcome::Refusal: n_refusal += k; break;
        case Outcome::PartialCompliance: n_partial += k; break;
        case Outcome::FullCompliance: n_full += k; break;
    }
}

std::array<double, 3> OutcomeDistribution::proportions() const {
    const long n = total();
    if (n <= 0) throw AnalysisError("outcome distribution is empty; proportions undefined");
    const double d = static_cast<double>(n);
    return {n_refusal / d, n_partial / d, n_full / d};
}

OutcomeDistribution OutcomeDistribution::from_proportions(const std::array<double, 3>& p,
                                                          long total) {
    OutcomeDistribution d;
    d.n_refusal = std::lround(p[0] * static_cast<double>(total));
    d.n_partial = std::lround(p[1] * static_cast<double>(total));
    d.n_full = std::lround(p[2] * static_cast<double>(total));
    return d;
}

OutcomeDistribution& OutcomeDistribution::operator+=(const OutcomeDistribution& other) {
    n_refusal += other.n_refusal;
    n_partial += other.n_partial;
    n_full += other.n_full;
    return *this;
}

namespace {

void require_analyzable(const RunRecord& r) {
    if (!r.valid) {
        throw AnalysisError("invalid record in analysis input: run_id=" + r.run_id);
    }
    if (!r.outcome.has_value()) {
        throw AnalysisError("uncoded record in analysis input: run_id=" + r.run_id);
    }
}

}  // namespace

std::map<NeighborhoodKey, std::vector<RunRecord>> group_by_neighborhood(
    const std::vector<RunRecord>& records) {
    std::map<NeighborhoodKey, std::vector<RunRecord>> groups;
    for (const RunRecord& r : records) {
        require_analyzable(r);
        groups[NeighborhoodKey{r.model_id, r.base_id}].push_back(r);
    }
    return groups;
}

OutcomeDistribution outcome_distribution(const std::vector<RunRecord>& records) {
    OutcomeDistribution dist;
    for (const RunRecord& r : records) {
        if (!r.valid) continue;
        require_analyzable(r);
        dist.add(*r.outcome);
    }
    return dist;
}

void sort_canonical(std::vector<RunRecord>& records) {
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        auto key = [](const RunRecord& r) {
            return std::tie(r.model_id, r.base_id, r.family, r.variant_index, r.run_id);
        };
        return key(a) < key(b);
    });
}

std::string make_perturbed_id(const std::string& base_id, Family family, int variant_index) {
    return base_id + ":" + std::string(to_string(family)) + ":" + std::to_string(variant_index);
}

std::string make_run_id(const std::string& model_id, const std::string& perturbed_id) {
    return model_id + ":" + perturbed_id;
}

}  // namespace rbeval
