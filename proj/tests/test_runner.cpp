#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rngaudit/errors.hpp"
#include "rngaudit/runner.hpp"
#include "rngaudit/store.hpp"

using namespace rngaudit;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const std::string dir = "/tmp/rngaudit_runner_test/" + name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_script(const std::string& name, const nlohmann::json& doc) {
    fs::create_directories("/tmp/rngaudit_runner_test/scripts");
    const std::string path = "/tmp/rngaudit_runner_test/scripts/" + name + ".json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

ProviderConfig mock_config(const std::string& name, const std::string& script_path) {
    ProviderConfig config;
    config.name = name;
    config.kind = ProviderKind::Mock;
    config.mock_script_path = script_path;
    return config;
}

// 2 providers x 2 languages x 1 range x 2 temperatures, 50 calls per cell.
ExperimentPlan demo_plan(const std::string& run_id, uint64_t seed) {
    const std::string always3 = write_script(
        "always3", {{"seed", 7}, {"cells", {{{"weights", {{"3", 1.0}}}}}}});
    const std::string mixed = write_script(
        "mixed",
        {{"seed", 11},
         {"cells",
          {{{"language", "JP"},
            {"weights", {{"<think>えっと、3かな</think>3", 0.5}, {"2, or so", 0.5}}}},
           {{"weights",
             {{"1", 1.0}, {"2", 1.0}, {"3", 1.0}, {"4", 1.0}, {"5", 1.0}}}}}}});

    ExperimentPlan plan;
    plan.run_id = run_id;
    plan.seed = seed;
    plan.calls_per_cell = 50;
    plan.providers = {mock_config("always3", always3), mock_config("mixed", mixed)};
    plan.languages = {Language::JP, Language::EN};  // unsorted on purpose
    plan.ranges = {5};
    plan.temperatures = {1.0, 0.1};
    return plan;
}

// All records in a store keyed by cell stem, timestamps masked out so
// transcript comparisons are time-independent.
std::vector<std::string> store_fingerprint(const std::string& dir) {
    std::vector<std::string> lines;
    for (const std::string& stem : list_cell_stems(dir)) {
        for (CallRecord record : read_cell_records(dir + "/" + stem + ".csv")) {
            record.timestamp = "?";
            lines.push_back(stem + "|" + format_csv_record(record));
        }
    }
    std::sort(lines.begin(), lines.end());
    return lines;
}

}  // namespace

TEST_CASE("plans parse from json") {
    const std::string script =
        write_script("parse", {{"seed", 1}, {"cells", {{{"weights", {{"3", 1.0}}}}}}});
    const nlohmann::json doc = {
        {"run_id", "demo"},
        {"seed", 42},
        {"calls_per_cell", 25},
        {"providers", {{{"name", "m"}, {"kind", "mock"}, {"mock_script", script}}}},
        {"languages", {"EN", "JP"}},
        {"ranges", {5, 10}},
        {"temperatures", {0.1, 1.0, 2.0}},
    };
    const ExperimentPlan plan = plan_from_json(doc);
    CHECK(plan.run_id == "demo");
    CHECK(plan.seed == 42);
    CHECK(plan.calls_per_cell == 25);
    REQUIRE(plan.providers.size() == 1);
    CHECK(plan.providers[0].kind == ProviderKind::Mock);
    CHECK(plan.languages == std::vector<Language>{Language::EN, Language::JP});
    CHECK(plan.ranges == std::vector<int>{5, 10});
    validate_plan(plan);

    CHECK_THROWS_AS(plan_from_json(nlohmann::json::array()), Error);
    nlohmann::json bad_language = doc;
    bad_language["languages"] = {"EN", "XX"};
    CHECK_THROWS_WITH_AS(plan_from_json(bad_language),
                         doctest::Contains("unsupported-language"), Error);
}

TEST_CASE("plan validation rejects bad dimensions") {
    const auto check_code = [](ExperimentPlan plan, Errc code) {
        try {
            validate_plan(plan);
            FAIL_CHECK("expected a validation error");
        } catch (const Error& e) {
            CHECK(e.code() == code);
        }
    };

    ExperimentPlan good = demo_plan("ok", 1);
    validate_plan(good);

    ExperimentPlan no_id = good;
    no_id.run_id.clear();
    check_code(no_id, Errc::InvalidPlan);

    ExperimentPlan empty = good;
    empty.languages.clear();
    check_code(empty, Errc::EmptyPlan);

    ExperimentPlan dup_provider = good;
    dup_provider.providers.push_back(dup_provider.providers[0]);
    check_code(dup_provider, Errc::InvalidPlan);

    ExperimentPlan dup_language = good;
    dup_language.languages.push_back(Language::EN);
    check_code(dup_language, Errc::InvalidPlan);

    ExperimentPlan dup_temperature = good;
    dup_temperature.temperatures.push_back(0.1);
    check_code(dup_temperature, Errc::InvalidPlan);

    ExperimentPlan low_range = good;
    low_range.ranges = {1};
    check_code(low_range, Errc::InvalidRange);

    ExperimentPlan cold = good;
    cold.temperatures = {0.0};
    check_code(cold, Errc::InvalidTemperature);

    ExperimentPlan hot = good;
    hot.temperatures = {2.5};
    check_code(hot, Errc::InvalidTemperature);

    ExperimentPlan no_calls = good;
    no_calls.calls_per_cell = 0;
    check_code(no_calls, Errc::InvalidPlan);
}

TEST_CASE("plan expansion is a sorted cartesian product") {
    ExperimentPlan plan = demo_plan("expand", 1);
    const std::vector<Cell> cells = expand_plan(plan);
    REQUIRE(cells.size() == 8);
    CHECK(std::is_sorted(cells.begin(), cells.end(), cell_less));
    CHECK(cells.front() == Cell{"always3", Language::EN, 5, 0.1});
    CHECK(cells.back() == Cell{"mixed", Language::JP, 5, 1.0});

    // Full published grid: 6 providers x 7 languages x 3 ranges x 6 temps.
    ExperimentPlan full = plan;
    full.providers.clear();
    for (const std::string& name : {"p1", "p2", "p3", "p4", "p5", "p6"})
        full.providers.push_back(mock_config(name, plan.providers[0].mock_script_path));
    full.languages = std::vector<Language>(kAllLanguages.begin(), kAllLanguages.end());
    full.ranges = {5, 10, 100};
    full.temperatures = {0.1, 0.3, 0.5, 0.8, 1.0, 2.0};
    const std::vector<Cell> grid = expand_plan(full);
    CHECK(grid.size() == 6 * 7 * 3 * 6);
    CHECK(grid.size() * full.calls_per_cell == 756 * 50);
}

TEST_CASE("a run fills every cell and records a manifest") {
    const ExperimentPlan plan = demo_plan("fill", 2026);
    const std::string dir = fresh_dir("fill");

    const RunSummary summary = run_experiment(plan, dir);
    CHECK(summary.cells_total == 8);
    CHECK(summary.cells_completed == 8);
    CHECK(summary.calls_executed == 400);
    CHECK(summary.calls_ok == 400);
    CHECK(summary.calls_error == 0);

    const auto manifest = read_run_manifest(dir);
    REQUIRE(manifest.has_value());
    CHECK(*manifest == manifest_for_plan(plan));

    const auto stems = list_cell_stems(dir);
    REQUIRE(stems.size() == 8);
    for (const std::string& stem : stems) {
        const auto records = read_cell_records(dir + "/" + stem + ".csv");
        REQUIRE(records.size() == 50);
        const auto transcripts = read_cell_transcripts(dir + "/" + stem + ".jsonl");
        REQUIRE(transcripts.size() == 50);
        for (int64_t i = 0; i < 50; ++i) {
            CHECK(records[i].call_index == i);
            CHECK(transcripts[i].call_index == i);
            CHECK(transcripts[i].raw_text == records[i].raw_text);
        }
        if (stem.rfind("always3__", 0) == 0) {
            for (const CallRecord& record : records) {
                CHECK(record.status == CallStatus::Ok);
                CHECK(record.parsed_value == 3);
            }
        }
    }

    // JP cells of the mixed provider exercise think blocks and comma escaping.
    const auto jp = read_cell_records(dir + "/mixed__JP__1-5__T1.0.csv");
    CHECK(std::any_of(jp.begin(), jp.end(),
                      [](const CallRecord& r) { return r.think_present; }));
    CHECK(std::any_of(jp.begin(), jp.end(), [](const CallRecord& r) {
        return r.raw_text == "2, or so" && r.status == CallStatus::ExtraText;
    }));
}

TEST_CASE("same seed reproduces the exact transcript, different seed does not") {
    const ExperimentPlan plan = demo_plan("repro", 99);
    const std::string dir_a = fresh_dir("repro_a");
    const std::string dir_b = fresh_dir("repro_b");
    run_experiment(plan, dir_a);
    run_experiment(plan, dir_b);
    const auto a = store_fingerprint(dir_a);
    CHECK(a == store_fingerprint(dir_b));
    CHECK(a.size() == 400);

    ExperimentPlan reseeded = plan;
    reseeded.seed = 100;
    const std::string dir_c = fresh_dir("repro_c");
    run_experiment(reseeded, dir_c);
    CHECK(a != store_fingerprint(dir_c));
}

TEST_CASE("worker count does not change the data") {
    ExperimentPlan plan = demo_plan("workers", 5);
    const std::string dir_a = fresh_dir("workers_1");
    const std::string dir_b = fresh_dir("workers_4");
    run_experiment(plan, dir_a);
    RunOptions options;
    options.max_workers = 4;
    const RunSummary summary = run_experiment(plan, dir_b, options);
    CHECK(summary.cells_completed == 8);
    CHECK(store_fingerprint(dir_a) == store_fingerprint(dir_b));
}

TEST_CASE("resume executes only the missing calls") {
    const ExperimentPlan plan = demo_plan("resume", 17);
    const std::string dir = fresh_dir("resume");
    run_experiment(plan, dir);
    const auto complete = store_fingerprint(dir);

    // Nothing missing: resume is a no-op.
    const RunSummary noop = resume_experiment(plan, dir);
    CHECK(noop.calls_executed == 0);
    CHECK(noop.cells_completed == 8);

    // Rerunning `run` on a matching store behaves exactly like resume.
    const RunSummary rerun = run_experiment(plan, dir);
    CHECK(rerun.calls_executed == 0);

    // Drop one cell entirely and truncate another to its first 30 records.
    fs::remove(dir + "/always3__EN__1-5__T0.1.csv");
    fs::remove(dir + "/always3__EN__1-5__T0.1.jsonl");
    const std::string truncated = dir + "/mixed__JP__1-5__T1.0.csv";
    const auto kept = read_cell_records(truncated);
    std::ofstream out(truncated, std::ios::binary | std::ios::trunc);
    out << kCsvHeader << "\n";
    for (size_t i = 0; i < 30; ++i) out << format_csv_record(kept[i]) << "\n";
    out.close();

    const RunSummary resumed = resume_experiment(plan, dir);
    CHECK(resumed.calls_executed == 70);
    CHECK(resumed.cells_completed == 8);
    CHECK(store_fingerprint(dir) == complete);
}

TEST_CASE("resume needs a manifest and rejects a drifted plan") {
    const ExperimentPlan plan = demo_plan("drift", 3);
    const std::string empty = fresh_dir("drift_empty");
    CHECK_THROWS_WITH_AS(resume_experiment(plan, empty),
                         doctest::Contains("manifest"), Error);

    const std::string dir = fresh_dir("drift");
    run_experiment(plan, dir);

    const auto check_drift = [&dir](ExperimentPlan changed) {
        try {
            run_experiment(changed, dir);
            FAIL_CHECK("expected plan-drift");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::PlanDrift);
        }
    };
    ExperimentPlan renamed = plan;
    renamed.run_id = "drift-2";
    check_drift(renamed);
    ExperimentPlan reseeded = plan;
    reseeded.seed = 4;
    check_drift(reseeded);
    ExperimentPlan retempered = plan;
    retempered.temperatures = {0.1, 0.8};
    check_drift(retempered);
    ExperimentPlan rescoped = plan;
    rescoped.calls_per_cell = 60;
    check_drift(rescoped);
}

TEST_CASE("provider hard failures become provider_error records") {
    const std::string flaky = write_script(
        "flaky", {{"seed", 3},
                  {"cells",
                   {{{"language", "EN"}, {"fail_attempts", 10}, {"weights", {{"3", 1.0}}}},
                    {{"weights", {{"4", 1.0}}}}}}});
    ExperimentPlan plan;
    plan.run_id = "flaky";
    plan.seed = 8;
    plan.calls_per_cell = 5;
    ProviderConfig provider = mock_config("flaky", flaky);
    provider.max_retries = 1;
    provider.backoff_base_ms = 1;
    plan.providers = {provider};
    plan.languages = {Language::EN, Language::JP};
    plan.ranges = {5};
    plan.temperatures = {1.0};

    const std::string dir = fresh_dir("flaky");
    const RunSummary summary = run_experiment(plan, dir);
    CHECK(summary.cells_total == 2);
    CHECK(summary.cells_completed == 2);
    CHECK(summary.calls_executed == 10);
    CHECK(summary.calls_ok == 5);
    CHECK(summary.calls_error == 5);

    const auto en = read_cell_records(dir + "/flaky__EN__1-5__T1.0.csv");
    REQUIRE(en.size() == 5);
    for (const CallRecord& record : en) {
        CHECK(record.status == CallStatus::ProviderError);
        CHECK_FALSE(record.parsed_value.has_value());
        CHECK(record.raw_text.find("transient-exhausted") != std::string::npos);
    }
    const auto jp = read_cell_records(dir + "/flaky__JP__1-5__T1.0.csv");
    REQUIRE(jp.size() == 5);
    CHECK(jp[0].status == CallStatus::Ok);

    // provider_error records count as completed: resume has nothing to do.
    CHECK(resume_experiment(plan, dir).calls_executed == 0);
}

TEST_CASE("cancel stops between calls and resume finishes the run") {
    ExperimentPlan plan = demo_plan("cancel", 23);
    plan.calls_per_cell = 20;
    const std::string reference_dir = fresh_dir("cancel_reference");
    run_experiment(plan, reference_dir);
    const auto reference = store_fingerprint(reference_dir);

    const std::string dir = fresh_dir("cancel");
    std::atomic<bool> cancel{true};
    RunOptions options;
    options.cancel = &cancel;
    const RunSummary stopped = run_experiment(plan, dir, options);
    CHECK(stopped.calls_executed == 0);
    CHECK(stopped.cells_completed == 0);
    REQUIRE(read_run_manifest(dir).has_value());

    // A mid-flight cancel leaves a prefix of the work behind.
    cancel = false;
    std::thread flipper([&cancel] {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
        cancel = true;
    });
    const RunSummary partial = run_experiment(plan, dir, options);
    flipper.join();
    CHECK(partial.calls_executed <= 160);

    const RunSummary finished = resume_experiment(plan, dir);
    CHECK(partial.calls_executed + finished.calls_executed == 160);
    CHECK(finished.cells_completed == 8);
    CHECK(store_fingerprint(dir) == reference);
}

TEST_CASE("missing script coverage degrades to provider_error records") {
    // Script only covers EN; the JP cell has no pattern and no wildcard.
    const std::string narrow = write_script(
        "narrow",
        {{"seed", 2}, {"cells", {{{"language", "EN"}, {"weights", {{"2", 1.0}}}}}}});
    ExperimentPlan plan;
    plan.run_id = "narrow";
    plan.seed = 1;
    plan.calls_per_cell = 4;
    plan.providers = {mock_config("narrow", narrow)};
    plan.languages = {Language::EN, Language::JP};
    plan.ranges = {5};
    plan.temperatures = {1.0};

    const std::string dir = fresh_dir("narrow");
    const RunSummary summary = run_experiment(plan, dir);
    CHECK(summary.calls_executed == 8);
    CHECK(summary.calls_ok == 4);
    CHECK(summary.calls_error == 4);
    const auto jp = read_cell_records(dir + "/narrow__JP__1-5__T1.0.csv");
    REQUIRE(jp.size() == 4);
    CHECK(jp[0].status == CallStatus::ProviderError);
    CHECK(jp[0].raw_text.find("script-coverage") != std::string::npos);
}
