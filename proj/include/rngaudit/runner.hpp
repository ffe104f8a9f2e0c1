#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "rngaudit/provider.hpp"
#include "rngaudit/store.hpp"

namespace rngaudit {

struct ExperimentPlan {
    std::string run_id;
    uint64_t seed = 0;
    int64_t calls_per_cell = 100;
    int max_tokens = 512;
    std::vector<ProviderConfig> providers;
    std::vector<Language> languages;
    std::vector<int> ranges;  // upper bounds, lower is always 1
    std::vector<double> temperatures;
    std::string prompt_templates_path;  // optional override of the builtin catalog
};

ExperimentPlan load_plan(const std::string& path);
ExperimentPlan plan_from_json(const nlohmann::json& doc);

/// Empty dimensions → empty-plan error; duplicates, bad ranges, or
/// temperatures outside (0, 2] → invalid-plan error.
void validate_plan(const ExperimentPlan& plan);

/// Full cartesian expansion in deterministic (provider, language, range,
/// temperature) order.
std::vector<Cell> expand_plan(const ExperimentPlan& plan);

RunManifest manifest_for_plan(const ExperimentPlan& plan);

struct RunSummary {
    int64_t cells_total = 0;
    int64_t cells_completed = 0;
    int64_t calls_executed = 0;  // new calls made by this invocation
    int64_t calls_ok = 0;        // executed calls that produced a response
    int64_t calls_error = 0;     // executed calls recorded as provider_error
    double wall_seconds = 0.0;
};

struct RunOptions {
    int max_workers = 1;                      // concurrent cells
    const std::atomic<bool>* cancel = nullptr;  // checked between calls
};

/// Executes all missing calls. A fresh store gets a manifest; an existing
/// store must match the plan (plan-drift error otherwise). Provider hard
/// failures become provider_error records and the run continues; storage
/// failures abort with partial data intact.
RunSummary run_experiment(const ExperimentPlan& plan, const std::string& store_dir,
                          const RunOptions& options = {});

/// Like run_experiment, but requires an existing store manifest.
RunSummary resume_experiment(const ExperimentPlan& plan, const std::string& store_dir,
                             const RunOptions& options = {});

}  // namespace rngaudit
