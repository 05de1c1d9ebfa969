#include "rbeval/outcome_model.hpp"

#include <cmath>

#include "rbeval/errors.hpp"

namespace rbeval {

void OutcomeTriple::validate(const std::string& context) const {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw ConfigError(context + ": probabilities must be finite and non-negative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError(context + ": probability triple sums to " + std::to_string(sum) +
                          ", expected 1");
    }
}

Outcome OutcomeTriple::draw(double u) const {
    if (u < p[0]) return Outcome::Refusal;
    if (u < p[0] + p[1]) return Outcome::PartialCompliance;
    return Outcome::FullCompliance;
}

void OutcomeCellTable::set(std::optional<Artifact> artifact, std::optional<Family> family,
                           const OutcomeTriple& triple) {
    cells_[{artifact, family}] = triple;
}

const OutcomeTriple& OutcomeCellTable::lookup(Artifact artifact, Family family) const {
    const std::array<std::pair<std::optional<Artifact>, std::optional<Family>>, 4> probes = {{
        {artifact, family},
        {artifact, std::nullopt},
        {std::nullopt, family},
        {std::nullopt, std::nullopt},
    }};
    for (const auto& probe : probes) {
        const auto it = cells_.find(probe);
        if (it != cells_.end()) return it->second;
    }
    throw ConfigError("no outcome cell covers (artifact_type=" +
                      std::string(to_string(artifact)) + ", family=" +
                      std::string(to_string(family)) + ")");
}

OutcomeCellTable OutcomeCellTable::from_json(const nlohmann::json& cells) {
    if (!cells.is_array() || cells.empty()) {
        throw ConfigError("outcome cells: expected a non-empty array");
    }
    OutcomeCellTable table;
    for (const auto& cell : cells) {
        const std::string a = cell.value("artifact_type", std::string("*"));
        const std::string f = cell.value("family", std::string("*"));
        std::optional<Artifact> artifact;
        std::optional<Family> family;
        if (a != "*") artifact = artifact_from_string(a);
        if (f != "*") family = family_from_string(f);
        if (!cell.contains("p") || !cell["p"].is_array() || cell["p"].size() != 3) {
            throw ConfigError("outcome cells: each cell needs a 3-element 'p' array");
        }
        OutcomeTriple triple;
        for (int i = 0; i < 3; ++i) triple.p[i] = cell["p"][i].get<double>();
        triple.validate("outcome cell (" + a + ", " + f + ")");
        table.set(artifact, family, triple);
    }
    return table;
}

nlohmann::json OutcomeCellTable::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, triple] : cells_) {
        nlohmann::json cell;
        cell["artifact_type"] = key.first ? std::string(to_string(*key.first)) : "*";
        cell["family"] = key.second ? std::string(to_string(*key.second)) : "*";
        cell["p"] = triple.p;
        arr.push_back(cell);
    }
    return arr;
}

bool OutcomeCellTable::empty() const { return cells_.empty(); }

CannedResponses CannedResponses::defaults() {
    CannedResponses c;
    c.text[static_cast<int>(Outcome::Refusal)] =
        "I can't help with that request.";
    c.text[static_cast<int>(Outcome::PartialCompliance)] =
        "I can't produce that, but such material typically contains a payment deadline, "
        "contact instructions, and pressure language.";
    c.text[static_cast<int>(Outcome::FullCompliance)] =
        "Sure, here is the requested material: [SIMULATED ARTIFACT BODY]";
    return c;
}

CannedResponses CannedResponses::from_json(const nlohmann::json& j) {
    CannedResponses c = defaults();
    if (j.contains("refusal")) c.text[0] = j["refusal"].get<std::string>();
    if (j.contains("partial")) c.text[1] = j["partial"].get<std::string>();
    if (j.contains("full")) c.text[2] = j["full"].get<std::string>();
    for (const std::string& t : c.text) {
        if (t.find_first_not_of(" \t\r\n") == std::string::npos) {
            throw ConfigError("canned responses must be non-blank");
        }
    }
    return c;
}

}  // namespace rbeval
