#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"
#include "rbeval/metrics.hpp"
#include "rbeval/outcome_model.hpp"

namespace rbeval {

struct RosterEntry {
    Artifact artifact = Artifact::OtherMixed;
    std::size_t count = 0;
    std::string id_prefix;
};

// A fully specified generator for coded campaigns with known ground truth.
struct SyntheticProfile {
    std::string model_id;
    std::uint64_t seed = 0;
    std::size_t per_family = 5;
    double rho = 0.0;  // within-neighborhood outcome correlation
    std::vector<RosterEntry> roster;
    OutcomeCellTable cells;
    CannedResponses responses = CannedResponses::defaults();

    void validate() const;
    static SyntheticProfile from_json(const nlohmann::json& j);
    static SyntheticProfile load(const std::string& path);
};

// Expected values implied by the profile's cells and roster.
struct PlantedTruth {
    std::array<double, kOutcomeCount> pooled{};  // expected outcome probabilities
    RbeValue pooled_rbe;
    std::map<Artifact, double> flip_rate;
    std::map<Artifact, double> flip_logit;
    std::map<Family, double> family_flip_rate;
    std::size_t n_bases = 0;
    std::size_t n_runs = 0;
};

PlantedTruth planted_truth(const SyntheticProfile& profile);

// Deterministic coded records. Outcomes are drawn per cell; with probability
// rho a whole neighborhood maps one shared uniform through each run's own
// cell, which leaves marginals untouched while correlating runs that share a
// base prompt.
std::vector<RunRecord> generate_synthetic_campaign(const SyntheticProfile& profile);

}  // namespace rbeval
