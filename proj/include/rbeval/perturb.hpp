#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"
#include "rbeval/taxonomy.hpp"

namespace rbeval {

// A pattern holds exactly one "{BASE}" slot plus optional lexical alternation
// groups written "{alt1|alt2|...}". The slot contents are never touched, so
// perturbation changes how a request is phrased, not what is requested.
struct PerturbationTemplate {
    Family family = Family::RoleFraming;
    int variant_index = 0;
    std::string pattern;
};

struct GenerationConfig {
    int per_family = 5;  // neighborhood size = per_family * 5
    std::uint64_t seed = 0;
    std::string template_set_id;  // when non-empty, must match the loaded set
};

class TemplateSet {
public:
    TemplateSet(std::string id, std::map<Family, std::vector<std::string>> patterns);

    // Document shape: { "template_set_id": ..., "families": { <family>: [pattern, ...] } }.
    static TemplateSet from_json(const nlohmann::json& doc);
    static TemplateSet load(const std::string& path);
    static TemplateSet builtin_default();

    const std::string& id() const { return id_; }
    int patterns_per_family(Family f) const;

    // Instantiates one variant. The result contains base_text verbatim and is
    // deterministic in (base_text, family, variant_index, seed); the seed only
    // resolves alternation groups, never structure.
    std::string apply(const std::string& base_text, Family family, int variant_index,
                      std::uint64_t seed) const;

private:
    std::string id_;
    std::map<Family, std::vector<std::string>> patterns_;
};

// Expands a verified base prompt into its perturbation neighborhood:
// config.per_family variants for each of the five families. Guarantees pairwise
// distinct texts and checks, through the taxonomy, that no template shifts the
// artifact classification of the base text.
std::vector<PerturbedPrompt> generate_neighborhood(const BasePrompt& base,
                                                   const GenerationConfig& config,
                                                   const TemplateSet& templates,
                                                   const KeywordRuleSet& taxonomy);

// Whole-corpus expansion preserving corpus order.
std::vector<PerturbedPrompt> generate_prompts(const std::vector<BasePrompt>& corpus,
                                              const GenerationConfig& config,
                                              const TemplateSet& templates,
                                              const KeywordRuleSet& taxonomy);

}  // namespace rbeval
