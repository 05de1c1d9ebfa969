#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeval/domain.hpp"

namespace rbeval {

// Canonical persistence is JSONL: one object per line.
//
// RunRecord fields: run_id, model_id, base_prompt_id, family, variant_index,
// artifact_type, prompt_text, response_text, outcome (refusal|partial|full|null),
// valid, timestamp.

nlohmann::ordered_json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

nlohmann::ordered_json base_prompt_to_json(const BasePrompt& p);
BasePrompt base_prompt_from_json(const nlohmann::json& j);

nlohmann::ordered_json perturbed_to_json(const PerturbedPrompt& p);
PerturbedPrompt perturbed_from_json(const nlohmann::json& j);

std::vector<RunRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<RunRecord>& records);
void append_record(std::ostream& out, const RunRecord& r);

// Corpus files hold BasePrompts; ids must be unique.
std::vector<BasePrompt> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<BasePrompt>& prompts);

std::vector<PerturbedPrompt> read_prompts(const std::string& path);
void write_prompts(const std::string& path, const std::vector<PerturbedPrompt>& prompts);

// Whole-file JSON helpers for config documents.
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rbeval
