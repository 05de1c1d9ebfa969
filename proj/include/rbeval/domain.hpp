#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rbeval {

// Outcome severity is ordered: Refusal < PartialCompliance < FullCompliance.
// The underlying values carry that order, so enum comparisons are meaningful.
enum class Outcome : std::uint8_t {
    Refusal = 0,
    PartialCompliance = 1,
    FullCompliance = 2,
};

enum class Family : std::uint8_t {
    RoleFraming = 0,
    MagnitudeScaling = 1,
    ConstraintInsertion = 2,
    ConditionalFraming = 3,
    AbstractionPressure = 4,
};

enum class Artifact : std::uint8_t {
    RansomwareText = 0,
    KeyloggerCode = 1,
    MalwareCode = 2,
    OtherMixed = 3,  // fallback bucket
};

inline constexpr int kOutcomeCount = 3;
inline constexpr int kFamilyCount = 5;
inline constexpr int kArtifactCount = 4;

inline constexpr std::array<Outcome, kOutcomeCount> kAllOutcomes = {
    Outcome::Refusal, Outcome::PartialCompliance, Outcome::FullCompliance};
inline constexpr std::array<Family, kFamilyCount> kAllFamilies = {
    Family::RoleFraming, Family::MagnitudeScaling, Family::ConstraintInsertion,
    Family::ConditionalFraming, Family::AbstractionPressure};
inline constexpr std::array<Artifact, kArtifactCount> kAllArtifacts = {
    Artifact::RansomwareText, Artifact::KeyloggerCode, Artifact::MalwareCode,
    Artifact::OtherMixed};

// Wire names (JSONL / CSV / JSON config files).
std::string_view to_string(Outcome o);
std::string_view to_string(Family f);
std::string_view to_string(Artifact a);

// Human-readable names for reports.
std::string_view display_name(Outcome o);
std::string_view display_name(Family f);
std::string_view display_name(Artifact a);

Outcome outcome_from_string(std::string_view s);
Family family_from_string(std::string_view s);
Artifact artifact_from_string(std::string_view s);

std::optional<Outcome> try_outcome_from_string(std::string_view s);
std::optional<Family> try_family_from_string(std::string_view s);
std::optional<Artifact> try_artifact_from_string(std::string_view s);

// A refusal-verified seed prompt. refusal_verified must be true before the
// prompt may enter a campaign.
struct BasePrompt {
    std::string id;
    std::string text;
    Artifact artifact_type = Artifact::OtherMixed;
    bool refusal_verified = false;
};

// One structured variant of a base prompt. artifact_type is denormalized from
// the base so downstream files are self-contained.
struct PerturbedPrompt {
    std::string id;
    std::string base_id;
    Family family = Family::RoleFraming;
    int variant_index = 0;
    std::string text;
    Artifact artifact_type = Artifact::OtherMixed;
};

// One run against one target. outcome stays empty until coding; valid=false
// marks blank responses or permanent transport failures, which are kept for
// the audit trail but excluded from all statistics.
struct RunRecord {
    std::string run_id;
    std::string model_id;
    std::string base_id;
    Family family = Family::RoleFraming;
    int variant_index = 0;
    Artifact artifact_type = Artifact::OtherMixed;
    std::string prompt_text;
    std::string response_text;
    std::optional<Outcome> outcome;
    bool valid = true;
    std::string timestamp;  // ISO-8601 UTC

    bool analyzable() const { return valid && outcome.has_value(); }
};

struct OutcomeDistribution {
    long n_refusal = 0;
    long n_partial = 0;
    long n_full = 0;

    long total() const { return n_refusal + n_partial + n_full; }
    long flips() const { return n_partial + n_full; }

    long count(Outcome o) const;
    void add(Outcome o, long k = 1);

    // Requires total() > 0.
    std::array<double, 3> proportions() const;

    // Inverse of proportions() for integer totals.
    static OutcomeDistribution from_proportions(const std::array<double, 3>& p, long total);

    OutcomeDistribution& operator+=(const OutcomeDistribution& other);
    bool operator==(const OutcomeDistribution&) const = default;
};

struct NeighborhoodKey {
    std::string model_id;
    std::string base_id;
    auto operator<=>(const NeighborhoodKey&) const = default;
};

// Partitions coded, valid records into (model_id, base_id) neighborhoods.
// Throws AnalysisError naming the first offending run_id when an uncoded or
// invalid record is present.
std::map<NeighborhoodKey, std::vector<RunRecord>> group_by_neighborhood(
    const std::vector<RunRecord>& records);

// Category counts over coded, valid records. Empty input yields all zeros.
OutcomeDistribution outcome_distribution(const std::vector<RunRecord>& records);

// Stable campaign-file order: (model_id, base_id, family, variant_index, run_id).
void sort_canonical(std::vector<RunRecord>& records);

// Deterministic identifiers shared by the gateway and the synthetic generator.
std::string make_perturbed_id(const std::string& base_id, Family family, int variant_index);
std::string make_run_id(const std::string& model_id, const std::string& perturbed_id);

}  // namespace rbeval
