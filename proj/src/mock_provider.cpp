#include "rngaudit/mock_provider.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "rngaudit/errors.hpp"
#include "rngaudit/format.hpp"
#include "rngaudit/rng.hpp"

namespace rngaudit {

namespace {

std::string field_as_string(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<int64_t>());
    if (value.is_number_float()) return format_temperature(value.get<double>());
    throw Error(Errc::Usage, "mock cell keys must be strings or numbers");
}

}  // namespace

MockScript mock_script_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(Errc::Usage, "mock script must be a JSON object");
    MockScript script;
    script.seed = doc.value("seed", uint64_t{0});
    if (!doc.contains("cells") || !doc.at("cells").is_array())
        throw Error(Errc::Usage, "mock script needs a cells array");
    for (const auto& record : doc.at("cells")) {
        MockCell cell;
        if (record.contains("language")) cell.language = field_as_string(record.at("language"));
        if (record.contains("range")) cell.range = field_as_string(record.at("range"));
        if (record.contains("temperature")) {
            const auto& t = record.at("temperature");
            cell.temperature =
                t.is_number() ? format_temperature(t.get<double>()) : field_as_string(t);
        }
        if (!record.contains("weights") || !record.at("weights").is_object())
            throw Error(Errc::Usage, "mock cell needs a weights object");
        double total = 0.0;
        for (const auto& [output, weight] : record.at("weights").items()) {
            const double w = weight.get<double>();
            if (w < 0) throw Error(Errc::Usage, "mock weights must be non-negative");
            total += w;
            cell.weights.emplace_back(output, w);
        }
        if (total <= 0) throw Error(Errc::Usage, "mock weights must sum to a positive value");
        cell.fail_attempts = record.value("fail_attempts", 0);
        cell.latency_ms = record.value("latency_ms", 0);
        script.cells.push_back(std::move(cell));
    }
    return script;
}

MockScript load_mock_script(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Usage, "cannot open mock script: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Usage, "mock script is not valid JSON: " + std::string(e.what()));
    }
    return mock_script_from_json(doc);
}

const MockCell* find_mock_cell(const MockScript& script, std::string_view language_code,
                               int range_upper, std::string_view temperature) {
    const std::string range = std::to_string(range_upper);
    const MockCell* best = nullptr;
    int best_score = -1;
    for (const auto& cell : script.cells) {
        int score = 0;
        if (cell.language != "*") {
            if (cell.language != language_code) continue;
            score += 4;
        }
        if (cell.range != "*") {
            if (cell.range != range) continue;
            score += 2;
        }
        if (cell.temperature != "*") {
            if (cell.temperature != temperature) continue;
            score += 1;
        }
        if (score > best_score) {
            best_score = score;
            best = &cell;
        }
    }
    return best;
}

std::string mock_draw(const MockScript& script, std::string_view language_code,
                      int range_upper, std::string_view temperature, int64_t call_index,
                      uint64_t extra_seed) {
    const MockCell* cell = find_mock_cell(script, language_code, range_upper, temperature);
    if (!cell)
        throw Error(Errc::ScriptCoverage,
                    "mock script has no cell for " + std::string(language_code) + "/1-" +
                        std::to_string(range_upper) + "/T" + std::string(temperature));

    uint64_t h = script.seed ^ extra_seed;
    h = mix64(h, fnv1a64(language_code));
    h = mix64(h, static_cast<uint64_t>(range_upper));
    h = mix64(h, fnv1a64(temperature));
    h = mix64(h, static_cast<uint64_t>(call_index));
    const double u = unit_double(h);

    double total = 0.0;
    for (const auto& [output, weight] : cell->weights) total += weight;
    double cumulative = 0.0;
    for (const auto& [output, weight] : cell->weights) {
        cumulative += weight / total;
        if (u < cumulative) return output;
    }
    return cell->weights.back().first;
}

MockProvider::MockProvider(ProviderConfig config)
    : Provider(std::move(config)), script_(load_mock_script(this->config().mock_script_path)) {}

MockProvider::MockProvider(ProviderConfig config, MockScript script)
    : Provider(std::move(config)), script_(std::move(script)) {}

CompletionResponse MockProvider::do_complete(const CompletionRequest& request,
                                             const CallContext& context, int attempt) {
    const std::string temperature = format_temperature(request.temperature);
    const MockCell* cell = find_mock_cell(script_, language_code(context.language),
                                          context.range_upper, temperature);
    if (!cell)
        throw Error(Errc::ScriptCoverage,
                    "mock script has no cell for " +
                        std::string(language_code(context.language)) + "/1-" +
                        std::to_string(context.range_upper) + "/T" + temperature);

    if (cell->latency_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(cell->latency_ms));
    if (attempt < cell->fail_attempts)
        throw TransientFailure{"scripted transient failure"};

    CompletionResponse response;
    response.text = mock_draw(script_, language_code(context.language), context.range_upper,
                              temperature, context.call_index, context.run_seed);
    return response;
}

}  // namespace rngaudit
