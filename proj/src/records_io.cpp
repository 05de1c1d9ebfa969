#include "rbeval/records_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rbeval/errors.hpp"

namespace rbeval {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string require_string(const json& j, const char* field, const std::string& context) {
    if (!j.contains(field) || !j[field].is_string()) {
        throw ValidationError(context + ": missing or non-string field '" + field + "'");
    }
    return j[field].get<std::string>();
}

template <typename LineFn>
void for_each_jsonl_line(const std::string& path, LineFn&& fn) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": invalid JSON: " + e.what());
        }
        fn(j, line_no);
    }
}

}  // namespace

ordered_json record_to_json(const RunRecord& r) {
    ordered_json j;
    j["run_id"] = r.run_id;
    j["model_id"] = r.model_id;
    j["base_prompt_id"] = r.base_id;
    j["family"] = to_string(r.family);
    j["variant_index"] = r.variant_index;
    j["artifact_type"] = to_string(r.artifact_type);
    j["prompt_text"] = r.prompt_text;
    j["response_text"] = r.response_text;
    if (r.outcome.has_value()) {
        j["outcome"] = to_string(*r.outcome);
    } else {
        j["outcome"] = nullptr;
    }
    j["valid"] = r.valid;
    j["timestamp"] = r.timestamp;
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.run_id = require_string(j, "run_id", "run record");
    const std::string ctx = "run record " + r.run_id;
    r.model_id = require_string(j, "model_id", ctx);
    r.base_id = require_string(j, "base_prompt_id", ctx);
    r.family = family_from_string(require_string(j, "family", ctx));
    if (!j.contains("variant_index") || !j["variant_index"].is_number_integer()) {
        throw ValidationError(ctx + ": missing or non-integer field 'variant_index'");
    }
    r.variant_index = j["variant_index"].get<int>();
    r.artifact_type = artifact_from_string(require_string(j, "artifact_type", ctx));
    r.prompt_text = require_string(j, "prompt_text", ctx);
    r.response_text = require_string(j, "response_text", ctx);
    if (j.contains("outcome") && !j["outcome"].is_null()) {
        if (!j["outcome"].is_string()) throw ValidationError(ctx + ": outcome must be a string or null");
        r.outcome = outcome_from_string(j["outcome"].get<std::string>());
    }
    if (!j.contains("valid") || !j["valid"].is_boolean()) {
        throw ValidationError(ctx + ": missing or non-boolean field 'valid'");
    }
    r.valid = j["valid"].get<bool>();
    r.timestamp = j.value("timestamp", std::string{});
    return r;
}

ordered_json base_prompt_to_json(const BasePrompt& p) {
    ordered_json j;
    j["id"] = p.id;
    j["text"] = p.text;
    j["artifact_type"] = to_string(p.artifact_type);
    j["refusal_verified"] = p.refusal_verified;
    return j;
}

BasePrompt base_prompt_from_json(const json& j) {
    BasePrompt p;
    p.id = require_string(j, "id", "base prompt");
    p.text = require_string(j, "text", "base prompt " + p.id);
    p.artifact_type = artifact_from_string(require_string(j, "artifact_type", "base prompt " + p.id));
    p.refusal_verified = j.value("refusal_verified", false);
    return p;
}

ordered_json perturbed_to_json(const PerturbedPrompt& p) {
    ordered_json j;
    j["id"] = p.id;
    j["base_prompt_id"] = p.base_id;
    j["family"] = to_string(p.family);
    j["variant_index"] = p.variant_index;
    j["artifact_type"] = to_string(p.artifact_type);
    j["text"] = p.text;
    return j;
}

PerturbedPrompt perturbed_from_json(const json& j) {
    PerturbedPrompt p;
    p.id = require_string(j, "id", "perturbed prompt");
    const std::string ctx = "perturbed prompt " + p.id;
    p.base_id = require_string(j, "base_prompt_id", ctx);
    p.family = family_from_string(require_string(j, "family", ctx));
    if (!j.contains("variant_index") || !j["variant_index"].is_number_integer()) {
        throw ValidationError(ctx + ": missing or non-integer field 'variant_index'");
    }
    p.variant_index = j["variant_index"].get<int>();
    p.artifact_type = artifact_from_string(require_string(j, "artifact_type", ctx));
    p.text = require_string(j, "text", ctx);
    return p;
}

std::vector<RunRecord> read_records(const std::string& path) {
    std::vector<RunRecord> records;
    std::set<std::string> seen;
    for_each_jsonl_line(path, [&](const json& j, std::size_t line_no) {
        RunRecord r = record_from_json(j);
        if (!seen.insert(r.run_id).second) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": duplicate run_id '" + r.run_id + "'");
        }
        records.push_back(std::move(r));
    });
    return records;
}

void write_records(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw TransportError("cannot write file: " + path);
    for (const RunRecord& r : records) append_record(out, r);
    out.flush();
    if (!out) throw TransportError("write failed: " + path);
}

void append_record(std::ostream& out, const RunRecord& r) {
    out << record_to_json(r).dump() << '\n';
}

std::vector<BasePrompt> read_corpus(const std::string& path) {
    std::vector<BasePrompt> prompts;
    std::set<std::string> seen;
    for_each_jsonl_line(path, [&](const json& j, std::size_t line_no) {
        BasePrompt p = base_prompt_from_json(j);
        if (!seen.insert(p.id).second) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": duplicate base prompt id '" + p.id + "'");
        }
        prompts.push_back(std::move(p));
    });
    return prompts;
}

void write_corpus(const std::string& path, const std::vector<BasePrompt>& prompts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw TransportError("cannot write file: " + path);
    for (const BasePrompt& p : prompts) out << base_prompt_to_json(p).dump() << '\n';
}

std::vector<PerturbedPrompt> read_prompts(const std::string& path) {
    std::vector<PerturbedPrompt> prompts;
    std::set<std::string> seen;
    for_each_jsonl_line(path, [&](const json& j, std::size_t line_no) {
        PerturbedPrompt p = perturbed_from_json(j);
        if (!seen.insert(p.id).second) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": duplicate perturbed prompt id '" + p.id + "'");
        }
        prompts.push_back(std::move(p));
    });
    return prompts;
}

void write_prompts(const std::string& path, const std::vector<PerturbedPrompt>& prompts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw TransportError("cannot write file: " + path);
    for (const PerturbedPrompt& p : prompts) out << perturbed_to_json(p).dump() << '\n';
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw TransportError("cannot write file: " + path);
    out << content;
    out.flush();
    if (!out) throw TransportError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace rbeval
