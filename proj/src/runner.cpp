#include "rngaudit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "rngaudit/errors.hpp"
#include "rngaudit/format.hpp"
#include "rngaudit/output_parser.hpp"
#include "rngaudit/prompt_catalog.hpp"

namespace rngaudit {

ExperimentPlan plan_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(Errc::InvalidPlan, "plan must be a JSON object");
    ExperimentPlan plan;
    plan.run_id = doc.value("run_id", std::string());
    plan.seed = doc.value("seed", uint64_t{0});
    plan.calls_per_cell = doc.value("calls_per_cell", int64_t{100});
    plan.max_tokens = doc.value("max_tokens", 512);
    plan.prompt_templates_path = doc.value("prompt_templates", std::string());

    for (const auto& record : doc.value("providers", nlohmann::json::array()))
        plan.providers.push_back(provider_config_from_json(record));
    for (const auto& code : doc.value("languages", std::vector<std::string>{}))
        plan.languages.push_back(require_language(code));
    plan.ranges = doc.value("ranges", std::vector<int>{});
    plan.temperatures = doc.value("temperatures", std::vector<double>{});
    validate_plan(plan);
    return plan;
}

ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Usage, "cannot open plan file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidPlan, "plan file is not valid JSON: " + std::string(e.what()));
    }
    return plan_from_json(doc);
}

void validate_plan(const ExperimentPlan& plan) {
    if (plan.run_id.empty()) throw Error(Errc::InvalidPlan, "plan needs a run_id");
    if (plan.providers.empty() || plan.languages.empty() || plan.ranges.empty() ||
        plan.temperatures.empty())
        throw Error(Errc::EmptyPlan, "plan has an empty dimension");
    if (plan.calls_per_cell < 1)
        throw Error(Errc::InvalidPlan, "calls_per_cell must be positive");
    if (plan.max_tokens < 1) throw Error(Errc::InvalidPlan, "max_tokens must be positive");

    std::set<std::string> names;
    for (const auto& provider : plan.providers) {
        validate_provider_config(provider);
        if (!names.insert(provider.name).second)
            throw Error(Errc::InvalidPlan, "duplicate provider name: " + provider.name);
    }
    std::set<Language> languages(plan.languages.begin(), plan.languages.end());
    if (languages.size() != plan.languages.size())
        throw Error(Errc::InvalidPlan, "duplicate language in plan");
    std::set<int> ranges(plan.ranges.begin(), plan.ranges.end());
    if (ranges.size() != plan.ranges.size())
        throw Error(Errc::InvalidPlan, "duplicate range in plan");
    for (int upper : plan.ranges)
        if (upper < 2) throw Error(Errc::InvalidRange, "range upper bound must be at least 2");
    std::set<std::string> temperatures;
    for (double t : plan.temperatures) {
        // RI is undefined at T=0, so the run would not be analyzable.
        if (t <= 0.0 || t > 2.0)
            throw Error(Errc::InvalidTemperature,
                        "temperature must be in (0, 2]: " + format_temperature(t));
        if (!temperatures.insert(format_temperature(t)).second)
            throw Error(Errc::InvalidPlan, "duplicate temperature in plan");
    }
}

std::vector<Cell> expand_plan(const ExperimentPlan& plan) {
    validate_plan(plan);
    std::vector<std::string> providers;
    for (const auto& provider : plan.providers) providers.push_back(provider.name);
    std::sort(providers.begin(), providers.end());

    std::vector<Language> languages = plan.languages;
    std::sort(languages.begin(), languages.end(), [](Language a, Language b) {
        return language_code(a) < language_code(b);
    });
    std::vector<int> ranges = plan.ranges;
    std::sort(ranges.begin(), ranges.end());
    std::vector<double> temperatures = plan.temperatures;
    std::sort(temperatures.begin(), temperatures.end());

    std::vector<Cell> cells;
    cells.reserve(providers.size() * languages.size() * ranges.size() * temperatures.size());
    for (const auto& provider : providers)
        for (Language language : languages)
            for (int upper : ranges)
                for (double temperature : temperatures)
                    cells.push_back(Cell{provider, language, upper, temperature});
    return cells;
}

RunManifest manifest_for_plan(const ExperimentPlan& plan) {
    RunManifest manifest;
    manifest.run_id = plan.run_id;
    manifest.seed = plan.seed;
    manifest.calls_per_cell = plan.calls_per_cell;
    for (const auto& provider : plan.providers) manifest.providers.push_back(provider.name);
    std::sort(manifest.providers.begin(), manifest.providers.end());
    manifest.languages = plan.languages;
    std::sort(manifest.languages.begin(), manifest.languages.end(),
              [](Language a, Language b) { return language_code(a) < language_code(b); });
    manifest.ranges = plan.ranges;
    std::sort(manifest.ranges.begin(), manifest.ranges.end());
    manifest.temperatures = plan.temperatures;
    std::sort(manifest.temperatures.begin(), manifest.temperatures.end());
    return manifest;
}

namespace {

void check_manifest(const RunManifest& stored, const RunManifest& planned) {
    if (stored.run_id != planned.run_id)
        throw Error(Errc::PlanDrift, "store belongs to run '" + stored.run_id +
                                         "', plan is '" + planned.run_id + "'");
    const auto match = [&](bool same, const char* what) {
        if (!same)
            throw Error(Errc::PlanDrift, std::string("store manifest disagrees with plan ") +
                                             what + " under run_id '" + planned.run_id + "'");
    };
    match(stored.seed == planned.seed, "seed");
    match(stored.calls_per_cell == planned.calls_per_cell, "calls_per_cell");
    match(stored.providers == planned.providers, "providers");
    match(stored.languages == planned.languages, "languages");
    match(stored.ranges == planned.ranges, "ranges");
    std::vector<std::string> stored_t, planned_t;
    for (double t : stored.temperatures) stored_t.push_back(format_temperature(t));
    for (double t : planned.temperatures) planned_t.push_back(format_temperature(t));
    match(stored_t == planned_t, "temperatures");
}

struct CellCounters {
    int64_t executed = 0;
    int64_t ok = 0;
    int64_t error = 0;
    bool completed = false;
};

CellCounters execute_cell(const ExperimentPlan& plan, const PromptCatalog& catalog,
                          Provider& provider, const Cell& cell,
                          const std::string& store_dir, const std::atomic<bool>* cancel) {
    CellCounters counters;
    CellStoreWriter writer(store_dir, cell);
    const std::string prompt = catalog.render(cell.language, cell.range_upper);

    for (int64_t index = 0; index < plan.calls_per_cell; ++index) {
        if (cancel && cancel->load()) break;
        if (writer.existing_indices().count(index)) continue;

        CompletionRequest request{provider.config().model_id, prompt, cell.temperature,
                                  plan.max_tokens};
        CallContext context{cell.language, cell.range_upper, cell.temperature, index,
                            plan.seed};

        CallRecord record;
        record.call_index = index;
        std::optional<std::string> think_text;
        try {
            const CompletionResponse response = provider.complete(request, context);
            const ParsedOutput parsed = parse_response(response.text, cell.range_upper);
            record.status = parsed.status;
            record.parsed_value = parsed.value;
            record.think_present = parsed.think_text.has_value();
            record.raw_text = response.text;
            think_text = parsed.think_text;
            ++counters.ok;
        } catch (const Error& e) {
            if (e.code() == Errc::Storage) throw;
            record.status = CallStatus::ProviderError;
            record.raw_text = e.what();
            ++counters.error;
        }
        record.timestamp = iso8601_now_utc();
        writer.append(record, think_text);
        ++counters.executed;
    }
    counters.completed =
        static_cast<int64_t>(writer.existing_indices().size()) >= plan.calls_per_cell;
    return counters;
}

RunSummary execute(const ExperimentPlan& plan, const std::string& store_dir,
                   const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();

    const RunManifest planned = manifest_for_plan(plan);
    const auto stored = read_run_manifest(store_dir);
    if (stored)
        check_manifest(*stored, planned);
    else
        write_run_manifest(store_dir, planned);

    const PromptCatalog catalog = plan.prompt_templates_path.empty()
                                      ? PromptCatalog::builtin()
                                      : PromptCatalog::load_file(plan.prompt_templates_path);

    std::map<std::string, std::unique_ptr<Provider>> providers;
    for (const auto& config : plan.providers) providers[config.name] = make_provider(config);

    const std::vector<Cell> cells = expand_plan(plan);
    RunSummary summary;
    summary.cells_total = static_cast<int64_t>(cells.size());

    std::mutex summary_mutex;
    std::exception_ptr failure;
    std::atomic<size_t> next_cell{0};

    const auto worker = [&] {
        for (;;) {
            const size_t i = next_cell.fetch_add(1);
            if (i >= cells.size()) return;
            if (options.cancel && options.cancel->load()) return;
            {
                std::lock_guard<std::mutex> lock(summary_mutex);
                if (failure) return;
            }
            try {
                const CellCounters counters =
                    execute_cell(plan, catalog, *providers.at(cells[i].provider), cells[i],
                                 store_dir, options.cancel);
                std::lock_guard<std::mutex> lock(summary_mutex);
                summary.calls_executed += counters.executed;
                summary.calls_ok += counters.ok;
                summary.calls_error += counters.error;
                summary.cells_completed += counters.completed ? 1 : 0;
            } catch (...) {
                std::lock_guard<std::mutex> lock(summary_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int workers =
        std::max(1, std::min<int>(options.max_workers, static_cast<int>(cells.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }
    if (failure) std::rethrow_exception(failure);

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace

RunSummary run_experiment(const ExperimentPlan& plan, const std::string& store_dir,
                          const RunOptions& options) {
    validate_plan(plan);
    return execute(plan, store_dir, options);
}

RunSummary resume_experiment(const ExperimentPlan& plan, const std::string& store_dir,
                             const RunOptions& options) {
    validate_plan(plan);
    if (!read_run_manifest(store_dir))
        throw Error(Errc::Storage, "store has no run manifest: " + store_dir);
    return execute(plan, store_dir, options);
}

}  // namespace rngaudit
