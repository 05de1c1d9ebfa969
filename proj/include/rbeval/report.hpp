#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rbeval {

// Pure renders of the analysis report document. Missing sections degrade to
// "not available" notes plus a warning instead of failing.
struct RenderedReport {
    std::string markdown;
    std::string outcome_rates_svg;   // stacked outcome shares per model
    std::string flip_rates_svg;      // grouped flip rates by artifact type
    std::string rbe_svg;             // pooled entropy comparison
    std::vector<std::string> warnings;
};

RenderedReport render_report(const nlohmann::ordered_json& report);

}  // namespace rbeval
