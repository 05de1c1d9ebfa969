#include "rbeval/perturb.hpp"

#include <map>
#include <set>
#include <sstream>

#include "rbeval/default_assets.hpp"
#include "rbeval/errors.hpp"
#include "rbeval/hashing.hpp"
#include "rbeval/records_io.hpp"

namespace rbeval {

namespace {

constexpr std::string_view kSlotToken = "BASE";

struct PatternPiece {
    enum class Kind { Literal, Slot, Alternation } kind = Kind::Literal;
    std::string literal;
    std::vector<std::string> alternatives;
};

std::vector<PatternPiece> parse_pattern(const std::string& pattern, const std::string& context) {
    std::vector<PatternPiece> pieces;
    int slots = 0;
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        const std::size_t open = pattern.find('{', pos);
        if (open == std::string::npos) {
            pieces.push_back({PatternPiece::Kind::Literal, pattern.substr(pos), {}});
            break;
        }
        if (open > pos) {
            pieces.push_back({PatternPiece::Kind::Literal, pattern.substr(pos, open - pos), {}});
        }
        const std::size_t close = pattern.find('}', open);
        if (close == std::string::npos) {
            throw ValidationError(context + ": unterminated '{' in pattern");
        }
        const std::string inner = pattern.substr(open + 1, close - open - 1);
        if (inner == kSlotToken) {
            pieces.push_back({PatternPiece::Kind::Slot, {}, {}});
            ++slots;
        } else if (inner.find('|') != std::string::npos) {
            PatternPiece piece;
            piece.kind = PatternPiece::Kind::Alternation;
            std::stringstream ss(inner);
            std::string alt;
            while (std::getline(ss, alt, '|')) {
                if (alt.empty()) throw ValidationError(context + ": empty alternative in pattern");
                piece.alternatives.push_back(alt);
            }
            pieces.push_back(std::move(piece));
        } else {
            throw ValidationError(context + ": unknown pattern token '{" + inner + "}'");
        }
        pos = close + 1;
    }
    if (slots != 1) {
        throw ValidationError(context + ": pattern must contain exactly one {BASE} slot, found " +
                              std::to_string(slots));
    }
    return pieces;
}

}  // namespace

TemplateSet::TemplateSet(std::string id, std::map<Family, std::vector<std::string>> patterns)
    : id_(std::move(id)), patterns_(std::move(patterns)) {
    if (id_.empty()) throw ValidationError("template set: missing template_set_id");
    for (Family f : kAllFamilies) {
        const auto it = patterns_.find(f);
        if (it == patterns_.end() || it->second.empty()) {
            throw ValidationError("template set '" + id_ + "': no patterns for family '" +
                                  std::string(to_string(f)) + "'");
        }
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            const std::string context = "template set '" + id_ + "', family '" +
                                        std::string(to_string(f)) + "', variant " +
                                        std::to_string(i);
            parse_pattern(it->second[i], context);  // validates slot count and tokens
            if (it->second[i] == "{BASE}") {
                throw ValidationError(context + ": pattern must alter the surface form");
            }
        }
    }
}

TemplateSet TemplateSet::from_json(const nlohmann::json& doc) {
    const std::string id = doc.value("template_set_id", std::string{});
    if (!doc.contains("families") || !doc["families"].is_object()) {
        throw ValidationError("template set: document must contain a 'families' object");
    }
    std::map<Family, std::vector<std::string>> patterns;
    for (const auto& [name, arr] : doc["families"].items()) {
        const Family family = family_from_string(name);
        if (!arr.is_array()) {
            throw ValidationError("template set: families." + name + " must be an array");
        }
        for (const auto& p : arr) patterns[family].push_back(p.get<std::string>());
    }
    return TemplateSet(id, std::move(patterns));
}

TemplateSet TemplateSet::load(const std::string& path) {
    return from_json(read_json_file(path));
}

TemplateSet TemplateSet::builtin_default() {
    return from_json(nlohmann::json::parse(assets::kDefaultTemplatesJson));
}

int TemplateSet::patterns_per_family(Family f) const {
    return static_cast<int>(patterns_.at(f).size());
}

std::string TemplateSet::apply(const std::string& base_text, Family family, int variant_index,
                               std::uint64_t seed) const {
    const auto& family_patterns = patterns_.at(family);
    if (variant_index < 0 || variant_index >= static_cast<int>(family_patterns.size())) {
        throw ValidationError("variant_index " + std::to_string(variant_index) +
                              " out of range for family '" + std::string(to_string(family)) +
                              "' (template set '" + id_ + "' has " +
                              std::to_string(family_patterns.size()) + " patterns)");
    }
    const std::string context = "template set '" + id_ + "'";
    const auto pieces = parse_pattern(family_patterns[variant_index], context);

    std::string out;
    int alternation_ordinal = 0;
    for (const PatternPiece& piece : pieces) {
        switch (piece.kind) {
            case PatternPiece::Kind::Literal:
                out += piece.literal;
                break;
            case PatternPiece::Kind::Slot:
                out += base_text;
                break;
            case PatternPiece::Kind::Alternation: {
                StreamKey key(seed);
                key.mix(std::string_view(to_string(family)))
                    .mix(static_cast<std::uint64_t>(variant_index))
                    .mix(static_cast<std::uint64_t>(alternation_ordinal++));
                const std::size_t pick = key.value() % piece.alternatives.size();
                out += piece.alternatives[pick];
                break;
            }
        }
    }
    return out;
}

std::vector<PerturbedPrompt> generate_neighborhood(const BasePrompt& base,
                                                   const GenerationConfig& config,
                                                   const TemplateSet& templates,
                                                   const KeywordRuleSet& taxonomy) {
    if (!base.refusal_verified) {
        throw ValidationError("base prompt '" + base.id +
                              "' is not refusal-verified and cannot enter a campaign");
    }
    if (config.per_family < 1) {
        throw ConfigError("per_family must be >= 1");
    }
    if (!config.template_set_id.empty() && config.template_set_id != templates.id()) {
        throw ConfigError("config names template set '" + config.template_set_id +
                          "' but the loaded set is '" + templates.id() + "'");
    }
    for (Family f : kAllFamilies) {
        if (config.per_family > templates.patterns_per_family(f)) {
            throw ValidationError("per_family=" + std::to_string(config.per_family) +
                                  " exceeds the " +
                                  std::to_string(templates.patterns_per_family(f)) +
                                  " patterns available for family '" +
                                  std::string(to_string(f)) + "'");
        }
    }

    const Artifact base_class = taxonomy.classify(base.text).artifact_type;

    std::vector<PerturbedPrompt> out;
    out.reserve(static_cast<std::size_t>(config.per_family) * kFamilyCount);
    std::map<std::string, std::string> seen_texts;  // text -> prompt id
    for (Family f : kAllFamilies) {
        for (int v = 0; v < config.per_family; ++v) {
            PerturbedPrompt p;
            p.base_id = base.id;
            p.family = f;
            p.variant_index = v;
            p.id = make_perturbed_id(base.id, f, v);
            p.text = templates.apply(base.text, f, v, config.seed);
            p.artifact_type = base.artifact_type;

            if (p.text == base.text || p.text.find(base.text) == std::string::npos) {
                throw ValidationError("template " + p.id +
                                      " failed to embed the base text verbatim");
            }
            const auto [it, inserted] = seen_texts.emplace(p.text, p.id);
            if (!inserted) {
                throw ValidationError("template collision: variants '" + it->second + "' and '" +
                                      p.id + "' produced identical texts");
            }
            const Artifact variant_class = taxonomy.classify(p.text).artifact_type;
            if (variant_class != base_class) {
                throw ValidationError(
                    "template " + p.id + " changed the artifact classification from '" +
                    std::string(to_string(base_class)) + "' to '" +
                    std::string(to_string(variant_class)) + "'; templates must not introduce "
                    "taxonomy keywords");
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<PerturbedPrompt> generate_prompts(const std::vector<BasePrompt>& corpus,
                                              const GenerationConfig& config,
                                              const TemplateSet& templates,
                                              const KeywordRuleSet& taxonomy) {
    std::set<std::string_view> ids;
    for (const BasePrompt& base : corpus) {
        if (!ids.insert(base.id).second) {
            throw ValidationError("duplicate base prompt id '" + base.id + "' in corpus");
        }
    }
    std::vector<PerturbedPrompt> all;
    for (const BasePrompt& base : corpus) {
        auto neighborhood = generate_neighborhood(base, config, templates, taxonomy);
        all.insert(all.end(), std::make_move_iterator(neighborhood.begin()),
                   std::make_move_iterator(neighborhood.end()));
    }
    return all;
}

}  // namespace rbeval
