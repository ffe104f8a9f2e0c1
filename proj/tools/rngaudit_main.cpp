#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rngaudit/cot_analyzer.hpp"
#include "rngaudit/errors.hpp"
#include "rngaudit/language.hpp"
#include "rngaudit/report.hpp"
#include "rngaudit/runner.hpp"
#include "rngaudit/stats.hpp"
#include "rngaudit/store.hpp"

namespace {

using namespace rngaudit;
namespace fs = std::filesystem;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

// Exit codes: 0 success, 1 usage, 2 provider failure, 3 storage failure.
int exit_code_for(Errc code) {
    switch (code) {
        case Errc::ProviderRejected:
        case Errc::TransientExhausted:
        case Errc::WireFormat:
        case Errc::ScriptCoverage:
            return 2;
        case Errc::Storage:
        case Errc::PlanDrift:
            return 3;
        default:
            return 1;
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Storage, "cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw Error(Errc::Storage, "write failed: " + path);
}

bool has_extension(const std::string& path, std::string_view ext) {
    return fs::path(path).extension() == ext;
}

void print_run_summary(const char* verb, const RunSummary& summary) {
    std::printf("%s: %lld/%lld cells complete, %lld calls executed (%lld ok, %lld provider errors) in %.2f s\n",
                verb, static_cast<long long>(summary.cells_completed),
                static_cast<long long>(summary.cells_total),
                static_cast<long long>(summary.calls_executed),
                static_cast<long long>(summary.calls_ok),
                static_cast<long long>(summary.calls_error), summary.wall_seconds);
    if (summary.cells_completed < summary.cells_total)
        std::printf("run is incomplete; continue with: rngaudit resume --config <file> --store <dir>\n");
}

int cmd_run(const std::string& config, const std::string& store, int max_workers,
            bool resume) {
    const ExperimentPlan plan = load_plan(config);
    RunOptions options;
    options.max_workers = max_workers;
    options.cancel = &g_cancel;
    std::signal(SIGINT, on_sigint);
    const RunSummary summary = resume ? resume_experiment(plan, store, options)
                                      : run_experiment(plan, store, options);
    print_run_summary(resume ? "resume" : "run", summary);
    return 0;
}

int cmd_analyze(const std::string& store, const std::string& out, int64_t min_valid,
                const std::string& entropy_norm) {
    EntropyNorm norm = EntropyNorm::DistinctObserved;
    if (entropy_norm == "range")
        norm = EntropyNorm::RangeSize;
    else if (entropy_norm != "distinct")
        throw Error(Errc::Usage, "unknown entropy norm: " + entropy_norm);
    const auto rows = summarize_store(store, min_valid, norm);
    write_file(out, format_stats_csv(rows));
    int64_t present = 0;
    for (const StatsRow& row : rows) present += row.stats.has_value();
    std::printf("analyzed %zu cells (%lld valid) -> %s\n", rows.size(),
                static_cast<long long>(present), out.c_str());
    return 0;
}

int cmd_report_table(const std::string& stats_path, const std::string& metric_name,
                     const std::string& out, std::optional<int> range_upper) {
    const auto metric = table_metric_from_name(metric_name);
    if (!metric) throw Error(Errc::Usage, "unknown metric: " + metric_name);
    const auto rows = parse_stats_csv(stats_path);
    const AggregateTable table = aggregate_table(rows, *metric, range_upper);
    write_file(out, has_extension(out, ".md") ? render_table_md(table)
                                              : render_table_csv(table));
    std::printf("table (%s): %zu providers x %zu languages -> %s\n",
                std::string(table_metric_name(*metric)).c_str(),
                table.providers.size(), table.languages.size(), out.c_str());
    return 0;
}

int cmd_report_heatmap(const std::string& store, const std::string& provider,
                       const std::string& language_code_arg, int range_upper,
                       const std::string& norm_name, const std::string& out) {
    const Language language = require_language(language_code_arg);
    const auto norm = heatmap_norm_from_name(norm_name);
    if (!norm) throw Error(Errc::Usage, "unknown norm: " + norm_name);
    const HeatmapMatrix matrix = heatmap_matrix(store, provider, language, range_upper);
    write_file(out, has_extension(out, ".svg") ? render_heatmap_svg(matrix, *norm)
                                               : render_matrix_csv(matrix, *norm));
    std::printf("heatmap %s/%s/1-%d: %zu temperatures -> %s\n", provider.c_str(),
                language_code_arg.c_str(), range_upper, matrix.temperatures.size(),
                out.c_str());
    return 0;
}

int cmd_report_violin(const std::string& store, const std::string& group_by_name,
                      const std::string& out) {
    const auto group_by = group_by_from_name(group_by_name);
    if (!group_by) throw Error(Errc::Usage, "unknown group-by: " + group_by_name);
    const auto groups = distribution_summary(store, *group_by);
    write_file(out, format_group_csv(groups));
    std::printf("distribution summary: %zu groups by %s -> %s\n", groups.size(),
                group_by_name.c_str(), out.c_str());
    return 0;
}

int cmd_baseline(int range_upper, int64_t samples, int64_t runs, uint64_t seed,
                 const std::string& out) {
    const auto stats =
        baseline_uniform_runs(range_upper, samples, static_cast<int>(runs), seed);
    write_file(out, format_baseline_csv(stats));
    double mean_p = 0.0, mean_ri = 0.0;
    for (const CellStats& s : stats) {
        mean_p += s.p_value;
        mean_ri += s.randomness_index;
    }
    if (!stats.empty()) {
        mean_p /= static_cast<double>(stats.size());
        mean_ri /= static_cast<double>(stats.size());
    }
    std::printf("baseline 1-%d: %lld runs x %lld samples, mean p %.3f, mean RI %.3f -> %s\n",
                range_upper, static_cast<long long>(runs),
                static_cast<long long>(samples), mean_p, mean_ri, out.c_str());
    return 0;
}

int cmd_cot(const std::string& store, const std::string& patterns,
            const std::string& out) {
    const PatternTable loaded =
        patterns.empty() ? PatternTable::builtin() : PatternTable::load_file(patterns);
    if (!fs::is_directory(store))
        throw Error(Errc::Storage, "store directory not found: " + store);

    std::string csv(kStrategyCsvHeader);
    csv += '\n';
    std::vector<CotAnalysis> analyses;
    for (const std::string& stem : list_cell_stems(store)) {
        const fs::path jsonl = fs::path(store) / (stem + ".jsonl");
        if (!fs::exists(jsonl)) continue;

        std::map<int64_t, std::optional<int64_t>> parsed_by_index;
        for (const CallRecord& record :
             read_cell_records((fs::path(store) / (stem + ".csv")).string()))
            parsed_by_index[record.call_index] = record.parsed_value;

        for (const Transcript& transcript : read_cell_transcripts(jsonl.string())) {
            if (!transcript.think_text) continue;
            std::optional<int64_t> parsed;
            if (auto it = parsed_by_index.find(transcript.call_index);
                it != parsed_by_index.end())
                parsed = it->second;
            CotAnalysis analysis = analyze_cot(*transcript.think_text, parsed, loaded);
            csv += strategy_csv_row(stem, transcript.call_index, analysis);
            csv += '\n';
            analyses.push_back(std::move(analysis));
        }
    }

    const StrategyAggregate aggregate = aggregate_strategies(analyses);
    write_file(out, csv);
    std::printf("analyzed %zu reasoning traces -> %s\n", aggregate.total_traces,
                out.c_str());
    for (const auto& [label, fraction] : aggregate.label_fraction)
        std::printf("  %-22s %.3f\n", std::string(strategy_label_name(label)).c_str(),
                    fraction);
    std::printf("reasoning language:\n");
    for (const auto& [code, fraction] : aggregate.language_fraction)
        std::printf("  %-22s %.3f\n", code.c_str(), fraction);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rngaudit: audit the randomness of chat-model number generation"};
    app.require_subcommand(1);

    std::string config, store, out, stats_path;
    std::string metric = "ri", norm = "abs", group_by = "provider";
    std::string provider, language, patterns, entropy_norm = "distinct";
    int range_upper = 5;
    int table_range = 0;
    int max_workers = 1;
    int64_t min_valid = 0, samples = 100, runs = 100;
    uint64_t seed = 42;

    CLI::App* run = app.add_subcommand("run", "execute an experiment plan");
    run->add_option("--config", config, "experiment plan (JSON)")->required();
    run->add_option("--store", store, "store directory")->required();
    run->add_option("--max-workers", max_workers, "concurrent cells");

    CLI::App* resume = app.add_subcommand("resume", "continue an interrupted run");
    resume->add_option("--config", config, "experiment plan (JSON)")->required();
    resume->add_option("--store", store, "store directory")->required();
    resume->add_option("--max-workers", max_workers, "concurrent cells");

    CLI::App* analyze = app.add_subcommand("analyze", "reduce a store to per-cell statistics");
    analyze->add_option("--store", store, "store directory")->required();
    analyze->add_option("--out", out, "stats CSV path")->required();
    analyze->add_option("--min-valid", min_valid,
                        "in-range parses required per cell (default ceil(calls/2))");
    analyze->add_option("--entropy-norm", entropy_norm, "distinct|range");

    CLI::App* report = app.add_subcommand("report", "render tables and figures");
    report->require_subcommand(1);

    CLI::App* table = report->add_subcommand("table", "provider x language metric table");
    table->add_option("--stats", stats_path, "stats CSV from analyze")->required();
    table->add_option("--metric", metric, "ri|p|v|h|mean|std");
    table->add_option("--out", out, "output .csv or .md")->required();
    table->add_option("--range", table_range, "restrict to one range upper bound");

    CLI::App* heatmap = report->add_subcommand("heatmap", "value frequency by temperature");
    heatmap->add_option("--store", store, "store directory")->required();
    heatmap->add_option("--provider", provider, "provider name")->required();
    heatmap->add_option("--language", language, "two-letter code")->required();
    heatmap->add_option("--range", range_upper, "range upper bound")->required();
    heatmap->add_option("--norm", norm, "abs|rowmax");
    heatmap->add_option("--out", out, "output .csv or .svg")->required();

    CLI::App* violin = report->add_subcommand("violin", "grouped distribution summaries");
    violin->add_option("--store", store, "store directory")->required();
    violin->add_option("--group-by", group_by, "provider|language|range|temperature");
    violin->add_option("--out", out, "summary CSV path")->required();

    CLI::App* baseline = app.add_subcommand("baseline", "seeded uniform calibration runs");
    baseline->add_option("--range", range_upper, "range upper bound");
    baseline->add_option("--samples", samples, "draws per run");
    baseline->add_option("--runs", runs, "number of runs");
    baseline->add_option("--seed", seed, "base seed");
    baseline->add_option("--out", out, "baseline CSV path")->required();

    CLI::App* cot = app.add_subcommand("cot", "mine reasoning traces for strategies");
    cot->add_option("--store", store, "store directory")->required();
    cot->add_option("--patterns", patterns, "pattern JSON (default: builtin table)");
    cot->add_option("--out", out, "per-trace strategy CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed()) return cmd_run(config, store, max_workers, false);
        if (resume->parsed()) return cmd_run(config, store, max_workers, true);
        if (analyze->parsed()) return cmd_analyze(store, out, min_valid, entropy_norm);
        if (table->parsed())
            return cmd_report_table(stats_path, metric, out,
                                    table_range > 0 ? std::optional<int>(table_range)
                                                    : std::nullopt);
        if (heatmap->parsed())
            return cmd_report_heatmap(store, provider, language, range_upper, norm, out);
        if (violin->parsed()) return cmd_report_violin(store, group_by, out);
        if (baseline->parsed())
            return cmd_baseline(range_upper, samples, runs, seed, out);
        if (cot->parsed()) return cmd_cot(store, patterns, out);
        std::fprintf(stderr, "rngaudit: no subcommand given\n");
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "rngaudit: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rngaudit: %s\n", e.what());
        return 1;
    }
}
