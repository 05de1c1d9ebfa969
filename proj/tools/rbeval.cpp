#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbeval/analyze.hpp"
#include "rbeval/coding.hpp"
#include "rbeval/domain.hpp"
#include "rbeval/errors.hpp"
#include "rbeval/gateway.hpp"
#include "rbeval/perturb.hpp"
#include "rbeval/records_io.hpp"
#include "rbeval/report.hpp"
#include "rbeval/synthetic.hpp"
#include "rbeval/taxonomy.hpp"

namespace {

using rbeval::ConfigError;
using rbeval::ValidationError;

struct GenerateArgs {
    std::string corpus;
    std::string templates;
    std::string out;
    std::uint64_t seed = 0;
    int per_family = 5;
};

struct RunArgs {
    std::string prompts;
    std::string config;
    std::string mock;
    std::string out;
    std::optional<std::uint64_t> seed;
};

struct CodeExportArgs {
    std::string records;
    std::string out;
};

struct CodeImportArgs {
    std::string records;
    std::string sheet;
    bool json_report = false;
};

struct AnalyzeArgs {
    std::string records;
    std::string out;
};

struct ReportArgs {
    std::string report;
    std::string out_dir;
};

struct SimulateArgs {
    std::string profile;
    std::string out;
    std::optional<std::uint64_t> seed;
};

rbeval::TemplateSet load_templates(const std::string& path) {
    if (!path.empty()) return rbeval::TemplateSet::load(path);
    return rbeval::TemplateSet::builtin_default();
}

int cmd_generate(const GenerateArgs& args) {
    const auto corpus = rbeval::read_corpus(args.corpus);
    const rbeval::TemplateSet templates = load_templates(args.templates);
    const rbeval::KeywordRuleSet taxonomy = rbeval::KeywordRuleSet::builtin_default();
    rbeval::GenerationConfig config;
    config.seed = args.seed;
    config.per_family = args.per_family;
    config.template_set_id = templates.id();
    const auto prompts = rbeval::generate_prompts(corpus, config, templates, taxonomy);
    rbeval::write_prompts(args.out, prompts);
    std::cerr << "generated " << prompts.size() << " perturbed prompts from "
              << corpus.size() << " base prompts\n";
    return 0;
}

int cmd_run(const RunArgs& args) {
    if (args.config.empty() == args.mock.empty()) {
        throw ConfigError("run needs exactly one of --config or --mock");
    }
    const auto prompts = rbeval::read_prompts(args.prompts);

    std::vector<rbeval::RunRecord> records;
    if (!args.mock.empty()) {
        rbeval::MockProfile profile = rbeval::MockProfile::load(args.mock);
        if (args.seed) profile.seed = *args.seed;
        records = rbeval::run_campaign(prompts, profile, args.out);
    } else {
        const rbeval::TargetConfig config = rbeval::TargetConfig::load(args.config);
        records = rbeval::run_campaign(prompts, config, args.out);
    }
    std::cerr << "campaign complete: " << records.size() << " records in " << args.out
              << "\n";
    return 0;
}

int cmd_code_export(const CodeExportArgs& args) {
    const auto records = rbeval::read_records(args.records);
    const std::string sheet = rbeval::export_coding_sheet(records);
    rbeval::write_text_file(args.out, sheet);
    std::size_t pending = 0;
    for (const auto& r : records) {
        if (r.valid && !r.outcome.has_value()) ++pending;
    }
    std::cerr << "exported " << pending << " uncoded record(s) to " << args.out << "\n";
    return 0;
}

int cmd_code_import(const CodeImportArgs& args) {
    auto records = rbeval::read_records(args.records);
    const std::string sheet = rbeval::read_text_file(args.sheet);
    const rbeval::ImportReport report = rbeval::import_coded_sheet(sheet, records);
    rbeval::write_records(args.records, records);
    if (args.json_report) {
        std::cout << report.to_json().dump(2) << "\n";
    }
    std::cerr << report.to_text() << "\n";
    return 0;
}

int cmd_analyze(const AnalyzeArgs& args) {
    const auto records = rbeval::read_records(args.records);
    const nlohmann::ordered_json report = rbeval::analyze_records(records);
    rbeval::write_text_file(args.out, report.dump(2) + "\n");
    std::cerr << "analysis written to " << args.out << "\n";
    return 0;
}

int cmd_report(const ReportArgs& args) {
    const nlohmann::ordered_json report =
        nlohmann::ordered_json::parse(rbeval::read_text_file(args.report), nullptr, true);
    const rbeval::RenderedReport rendered = rbeval::render_report(report);

    std::filesystem::path dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw rbeval::TransportError("cannot create output directory '" + args.out_dir +
                                     "': " + ec.message());
    }
    rbeval::write_text_file((dir / "report.md").string(), rendered.markdown);
    rbeval::write_text_file((dir / "outcome_rates.svg").string(),
                            rendered.outcome_rates_svg);
    rbeval::write_text_file((dir / "flip_rates_by_artifact.svg").string(),
                            rendered.flip_rates_svg);
    rbeval::write_text_file((dir / "rbe_comparison.svg").string(), rendered.rbe_svg);
    for (const auto& w : rendered.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "report rendered into " << args.out_dir << "\n";
    return 0;
}

int cmd_simulate(const SimulateArgs& args) {
    rbeval::SyntheticProfile profile = rbeval::SyntheticProfile::load(args.profile);
    if (args.seed) profile.seed = *args.seed;
    const auto records = rbeval::generate_synthetic_campaign(profile);
    rbeval::write_records(args.out, records);
    std::cerr << "simulated " << records.size() << " coded records into " << args.out
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch harness for measuring refusal stability under prompt perturbations"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand(
        "generate", "Expand a base-prompt corpus into perturbation neighborhoods");
    generate->add_option("--corpus", gen.corpus, "Base prompt corpus (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    generate->add_option("--templates", gen.templates,
                         "Template set JSON (defaults to the built-in set)");
    generate->add_option("--seed", gen.seed, "Seed for alternation choices");
    generate->add_option("--per-family", gen.per_family, "Variants per family (default 5)");
    generate->add_option("--out", gen.out, "Output perturbed prompt file (JSONL)")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Execute a campaign over perturbed prompts");
    run_cmd->add_option("prompts", run.prompts, "Perturbed prompt file (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--config", run.config, "Live target configuration JSON");
    run_cmd->add_option("--mock", run.mock, "Mock target profile JSON");
    run_cmd->add_option("--seed", run.seed, "Override the mock profile seed");
    run_cmd->add_option("--out", run.out, "Records output/checkpoint file (JSONL)")
        ->required();

    auto* code = app.add_subcommand("code", "Human coding-sheet workflow");
    code->require_subcommand(1);

    CodeExportArgs code_export;
    auto* export_cmd = code->add_subcommand("export", "Export uncoded records to CSV");
    export_cmd->add_option("--records", code_export.records, "Records file (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    export_cmd->add_option("--out", code_export.out, "Coding sheet output (CSV)")->required();

    CodeImportArgs code_import;
    auto* import_cmd = code->add_subcommand("import", "Import a coded CSV sheet");
    import_cmd->add_option("--records", code_import.records, "Records file (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    import_cmd->add_option("sheet", code_import.sheet, "Coded sheet (CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    import_cmd->add_flag("--json", code_import.json_report,
                         "Print the import summary as JSON on stdout");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Run the staged statistical analysis");
    analyze_cmd->add_option("--records", analyze.records, "Coded records file (JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    analyze_cmd->add_option("--out", analyze.out, "Report JSON output")->required();

    ReportArgs report;
    auto* report_cmd =
        app.add_subcommand("report", "Render a report JSON to Markdown and SVG charts");
    report_cmd->add_option("--report", report.report, "Report JSON produced by analyze")
        ->required()
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--out", report.out_dir, "Output directory")->required();

    SimulateArgs simulate;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Generate a synthetic coded campaign");
    simulate_cmd->add_option("profile", simulate.profile, "Synthetic profile JSON")
        ->required()
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--seed", simulate.seed, "Override the profile seed");
    simulate_cmd->add_option("--out", simulate.out, "Records output file (JSONL)")
        ->required();

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return cmd_generate(gen);
        if (run_cmd->parsed()) return cmd_run(run);
        if (code->parsed()) {
            if (export_cmd->parsed()) return cmd_code_export(code_export);
            if (import_cmd->parsed()) return cmd_code_import(code_import);
        }
        if (analyze_cmd->parsed()) return cmd_analyze(analyze);
        if (report_cmd->parsed()) return cmd_report(report);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const rbeval::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 3;
    } catch (const rbeval::AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
