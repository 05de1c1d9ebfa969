#include "rbeval/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "rbeval/default_assets.hpp"
#include "rbeval/errors.hpp"
#include "rbeval/records_io.hpp"

namespace rbeval {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

bool keyword_hits(std::string_view text, std::string_view keyword) {
    if (keyword.empty()) return false;
    const std::string hay = to_lower(text);
    const std::string needle = to_lower(keyword);
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(static_cast<unsigned char>(hay[pos - 1]));
        const std::size_t end = pos + needle.size();
        const bool right_ok =
            end == hay.size() || !is_word_char(static_cast<unsigned char>(hay[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

KeywordRuleSet::KeywordRuleSet(std::vector<KeywordRule> rules) : rules_(std::move(rules)) {
    std::set<int> priorities;
    for (const KeywordRule& rule : rules_) {
        if (rule.artifact_type == Artifact::OtherMixed) {
            throw ValidationError("taxonomy rules: other_mixed is the implicit fallback and "
                                  "cannot carry keywords");
        }
        if (rule.keywords.empty()) {
            throw ValidationError("taxonomy rules: rule for '" +
                                  std::string(to_string(rule.artifact_type)) +
                                  "' has no keywords");
        }
        if (!priorities.insert(rule.priority).second) {
            throw ValidationError("taxonomy rules: duplicate priority " +
                                  std::to_string(rule.priority));
        }
    }
    std::sort(rules_.begin(), rules_.end(),
              [](const KeywordRule& a, const KeywordRule& b) { return a.priority > b.priority; });
}

KeywordRuleSet KeywordRuleSet::from_json(const nlohmann::json& doc) {
    if (!doc.contains("rules") || !doc["rules"].is_array()) {
        throw ValidationError("taxonomy rules: document must contain a 'rules' array");
    }
    std::vector<KeywordRule> rules;
    for (const auto& entry : doc["rules"]) {
        KeywordRule rule;
        rule.artifact_type = artifact_from_string(entry.at("artifact_type").get<std::string>());
        rule.priority = entry.at("priority").get<int>();
        for (const auto& kw : entry.at("keywords")) {
            rule.keywords.push_back(kw.get<std::string>());
        }
        rules.push_back(std::move(rule));
    }
    return KeywordRuleSet(std::move(rules));
}

KeywordRuleSet KeywordRuleSet::load(const std::string& path) {
    return from_json(read_json_file(path));
}

Classification KeywordRuleSet::classify(std::string_view text) const {
    for (const KeywordRule& rule : rules_) {
        std::vector<std::string> matched;
        for (const std::string& kw : rule.keywords) {
            if (keyword_hits(text, kw)) matched.push_back(kw);
        }
        if (!matched.empty()) return Classification{rule.artifact_type, std::move(matched)};
    }
    return Classification{Artifact::OtherMixed, {}};
}

std::array<std::size_t, kArtifactCount> classify_corpus(const KeywordRuleSet& rules,
                                                        const std::vector<std::string>& texts) {
    std::array<std::size_t, kArtifactCount> counts{};
    for (const std::string& text : texts) {
        counts[static_cast<int>(rules.classify(text).artifact_type)]++;
    }
    return counts;
}

KeywordRuleSet KeywordRuleSet::builtin_default() {
    return from_json(nlohmann::json::parse(assets::kDefaultTaxonomyJson));
}

}  // namespace rbeval
