#include "rbeval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rbeval/errors.hpp"
#include "rbeval/hashing.hpp"
#include "rbeval/records_io.hpp"

namespace rbeval {

namespace {

constexpr const char* kSyntheticTimestamp = "1970-01-01T00:00:00Z";

std::string base_id_for(const RosterEntry& entry, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", index + 1);
    return entry.id_prefix + "-" + buf;
}

}  // namespace

void SyntheticProfile::validate() const {
    if (model_id.empty()) throw ConfigError("synthetic profile needs a model_id");
    if (per_family == 0) throw ConfigError("synthetic profile needs per_family >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw ConfigError("synthetic profile rho must lie in [0, 1]");
    }
    if (roster.empty()) throw ConfigError("synthetic profile roster is empty");
    std::set<std::string> prefixes;
    for (const auto& entry : roster) {
        if (entry.count == 0) throw ConfigError("synthetic roster entry has count 0");
        if (entry.id_prefix.empty()) {
            throw ConfigError("synthetic roster entry needs an id_prefix");
        }
        if (!prefixes.insert(entry.id_prefix).second) {
            throw ConfigError("synthetic roster id_prefix '" + entry.id_prefix +
                              "' is duplicated");
        }
    }
    for (const auto& entry : roster) {
        for (Family f : kAllFamilies) cells.lookup(entry.artifact, f);
    }
}

SyntheticProfile SyntheticProfile::from_json(const nlohmann::json& j) {
    SyntheticProfile p;
    try {
        p.model_id = j.at("model_id").get<std::string>();
        p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("per_family")) p.per_family = j.at("per_family").get<std::size_t>();
        if (j.contains("rho")) p.rho = j.at("rho").get<double>();
        for (const auto& e : j.at("roster")) {
            RosterEntry entry;
            entry.artifact = artifact_from_string(e.at("artifact_type").get<std::string>());
            entry.count = e.at("count").get<std::size_t>();
            entry.id_prefix = e.at("id_prefix").get<std::string>();
            p.roster.push_back(std::move(entry));
        }
        p.cells = OutcomeCellTable::from_json(j.at("cells"));
        if (j.contains("responses")) {
            p.responses = CannedResponses::from_json(j.at("responses"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed synthetic profile: ") + e.what());
    }
    p.validate();
    return p;
}

SyntheticProfile SyntheticProfile::load(const std::string& path) {
    return from_json(read_json_file(path));
}

PlantedTruth planted_truth(const SyntheticProfile& profile) {
    profile.validate();
    PlantedTruth truth;

    std::size_t total_bases = 0;
    for (const auto& entry : profile.roster) total_bases += entry.count;
    truth.n_bases = total_bases;
    truth.n_runs = total_bases * kFamilyCount * profile.per_family;

    std::map<Artifact, double> weight;
    for (const auto& entry : profile.roster) {
        weight[entry.artifact] +=
            static_cast<double>(entry.count) / static_cast<double>(total_bases);
    }

    for (const auto& [artifact, w] : weight) {
        std::array<double, kOutcomeCount> mean{};
        for (Family f : kAllFamilies) {
            const OutcomeTriple& cell = profile.cells.lookup(artifact, f);
            for (std::size_t k = 0; k < kOutcomeCount; ++k) {
                mean[k] += cell.p[k] / static_cast<double>(kFamilyCount);
            }
        }
        const double flip = 1.0 - mean[0];
        truth.flip_rate[artifact] = flip;
        truth.flip_logit[artifact] =
            std::log(flip) - std::log1p(-flip);  // -inf when the cell never flips
        for (std::size_t k = 0; k < kOutcomeCount; ++k) truth.pooled[k] += w * mean[k];
    }

    for (Family f : kAllFamilies) {
        double flip = 0.0;
        for (const auto& [artifact, w] : weight) {
            flip += w * (1.0 - profile.cells.lookup(artifact, f).p[0]);
        }
        truth.family_flip_rate[f] = flip;
    }

    double bits = 0.0;
    for (double p : truth.pooled) {
        if (p > 0.0) bits -= p * std::log2(p);
    }
    truth.pooled_rbe.bits = bits;
    truth.pooled_rbe.normalized = bits / std::log2(3.0);
    return truth;
}

std::vector<RunRecord> generate_synthetic_campaign(const SyntheticProfile& profile) {
    profile.validate();
    std::vector<RunRecord> records;

    for (const auto& entry : profile.roster) {
        for (std::size_t b = 0; b < entry.count; ++b) {
            const std::string base_id = base_id_for(entry, b);

            const double coin = StreamKey(profile.seed)
                                    .mix("neighborhood-coin")
                                    .mix(base_id)
                                    .uniform01();
            const bool shared = coin < profile.rho;
            const double shared_u =
                StreamKey(profile.seed).mix("shared-draw").mix(base_id).uniform01();

            for (Family family : kAllFamilies) {
                const OutcomeTriple& cell = profile.cells.lookup(entry.artifact, family);
                for (std::size_t v = 0; v < profile.per_family; ++v) {
                    const double u = shared ? shared_u
                                            : StreamKey(profile.seed)
                                                  .mix("own-draw")
                                                  .mix(base_id)
                                                  .mix(to_string(family))
                                                  .mix(static_cast<std::uint64_t>(v))
                                                  .uniform01();
                    const Outcome outcome = cell.draw(u);
                    const std::string perturbed_id =
                        make_perturbed_id(base_id, family, static_cast<int>(v));

                    RunRecord r;
                    r.run_id = make_run_id(profile.model_id, perturbed_id);
                    r.model_id = profile.model_id;
                    r.base_id = base_id;
                    r.family = family;
                    r.variant_index = static_cast<int>(v);
                    r.artifact_type = entry.artifact;
                    r.prompt_text = "[synthetic] " + perturbed_id;
                    r.response_text = profile.responses.for_outcome(outcome);
                    r.outcome = outcome;
                    r.valid = true;
                    r.timestamp = kSyntheticTimestamp;
                    records.push_back(std::move(r));
                }
            }
        }
    }
    sort_canonical(records);
    return records;
}

}  // namespace rbeval
