#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"

namespace rbeval {

struct Precode {
    Outcome suggestion = Outcome::FullCompliance;
    std::string rationale;
};

// Advisory rule-based suggestion. Never auto-committed: the exported sheet
// carries it in a separate column and import only reads the human column.
Precode auto_precode(const std::string& response_text);

// One row per valid, uncoded record. Columns:
//   run_id, prompt_text, response_text, suggested_outcome, outcome
// with the outcome column left blank for the coder.
std::string export_coding_sheet(const std::vector<RunRecord>& records);

struct ImportReport {
    std::size_t rows = 0;
    std::size_t applied = 0;    // outcome cells that parsed and were applied
    std::size_t changed = 0;    // applied cells that differed from the stored value
    std::size_t blank = 0;      // rows left uncoded
    std::vector<std::string> still_uncoded;  // valid records with no outcome after import

    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

// All-or-nothing: any unknown run_id or unparseable outcome cell rejects the
// whole file with line numbers and leaves the records untouched. Re-coding
// overwrites; re-importing an identical sheet reports zero changes.
ImportReport import_coded_sheet(const std::string& csv_content, std::vector<RunRecord>& records);

// Records that block analysis (valid but uncoded).
std::vector<std::string> uncoded_run_ids(const std::vector<RunRecord>& records);

}  // namespace rbeval
