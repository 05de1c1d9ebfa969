#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "rbeval/domain.hpp"

namespace rbeval {

// (p_refusal, p_partial, p_full); must sum to 1 within 1e-12.
struct OutcomeTriple {
    std::array<double, 3> p{1.0, 0.0, 0.0};

    void validate(const std::string& context) const;
    Outcome draw(double u) const;  // inverse CDF on a uniform in [0, 1)
    double flip_probability() const { return p[1] + p[2]; }
};

// Per-(artifact, family) outcome probabilities with "*" wildcards. Lookup
// precedence: exact cell, artifact-wide, family-wide, global. A miss is a
// configuration error.
class OutcomeCellTable {
public:
    void set(std::optional<Artifact> artifact, std::optional<Family> family,
             const OutcomeTriple& triple);
    const OutcomeTriple& lookup(Artifact artifact, Family family) const;

    // Array entries: {"artifact_type": <name>|"*", "family": <name>|"*", "p": [r, p, f]}.
    static OutcomeCellTable from_json(const nlohmann::json& cells);
    nlohmann::json to_json() const;

    bool empty() const;

private:
    // nullopt = wildcard
    std::map<std::pair<std::optional<Artifact>, std::optional<Family>>, OutcomeTriple> cells_;
};

// Canned response bodies per outcome category.
struct CannedResponses {
    std::array<std::string, 3> text;

    static CannedResponses defaults();
    static CannedResponses from_json(const nlohmann::json& j);
    const std::string& for_outcome(Outcome o) const { return text[static_cast<int>(o)]; }
};

}  // namespace rbeval
