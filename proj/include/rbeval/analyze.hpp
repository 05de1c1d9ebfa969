#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"

namespace rbeval {

// Runs the full staged analysis over coded records and returns the report
// document: per-model descriptive tables, family chi-square, binary logistic
// fits for flips and full compliance, a multinomial fit by artifact, a GEE
// fit clustered on base prompt, entropy summaries, and the fragile-prompt
// list. Valid-but-uncoded records abort the analysis.
nlohmann::ordered_json analyze_records(const std::vector<RunRecord>& records);

}  // namespace rbeval
