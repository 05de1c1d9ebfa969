#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"

namespace rbeval {

struct KeywordRule {
    Artifact artifact_type = Artifact::OtherMixed;
    int priority = 0;  // higher wins
    std::vector<std::string> keywords;
};

struct Classification {
    Artifact artifact_type = Artifact::OtherMixed;
    std::vector<std::string> matched_keywords;  // empty for the fallback bucket
};

// Conservative keyword rules. Matching is case-insensitive on word boundaries;
// a prompt is only assigned a type when at least one keyword hits, and the
// highest-priority rule with a hit wins. Everything else falls back to
// Artifact::OtherMixed.
class KeywordRuleSet {
public:
    explicit KeywordRuleSet(std::vector<KeywordRule> rules);

    static KeywordRuleSet from_json(const nlohmann::json& doc);
    static KeywordRuleSet load(const std::string& path);
    static KeywordRuleSet builtin_default();

    Classification classify(std::string_view text) const;

    const std::vector<KeywordRule>& rules() const { return rules_; }

private:
    std::vector<KeywordRule> rules_;  // sorted by priority, descending
};

// Case-insensitive whole-word occurrence test (multi-word keywords allowed).
bool keyword_hits(std::string_view text, std::string_view keyword);

// Per-type counts over a corpus; indexed by static_cast<int>(Artifact).
std::array<std::size_t, kArtifactCount> classify_corpus(const KeywordRuleSet& rules,
                                                        const std::vector<std::string>& texts);

}  // namespace rbeval
