#include "rngaudit/store.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>

#include <json.hpp>

#include "rngaudit/errors.hpp"
#include "rngaudit/format.hpp"
#include "rngaudit/output_parser.hpp"

namespace fs = std::filesystem;

namespace rngaudit {

const char* const kCsvHeader =
    "call_index,timestamp_iso8601,status,parsed_value,think_present,raw_text_escaped";

bool cell_less(const Cell& a, const Cell& b) {
    if (a.provider != b.provider) return a.provider < b.provider;
    if (a.language != b.language)
        return language_code(a.language) < language_code(b.language);
    if (a.range_upper != b.range_upper) return a.range_upper < b.range_upper;
    return a.temperature < b.temperature;
}

std::string cell_file_stem(const Cell& cell) {
    return cell.provider + "__" + std::string(language_code(cell.language)) + "__1-" +
           std::to_string(cell.range_upper) + "__T" + format_temperature(cell.temperature);
}

namespace {

std::optional<int64_t> parse_int(std::string_view text) {
    if (text.empty()) return std::nullopt;
    int64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

// Splits a CSV line on unescaped commas (backslash escapes the next byte).
std::vector<std::string_view> split_unescaped(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\') {
            ++i;
        } else if (line[i] == ',') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    fields.push_back(line.substr(start));
    return fields;
}

}  // namespace

std::optional<Cell> parse_cell_stem(std::string_view stem) {
    // Parse from the right: __T<temp>, __1-<upper>, __<lang>, rest = provider.
    const size_t t_sep = stem.rfind("__");
    if (t_sep == std::string_view::npos || t_sep + 3 > stem.size()) return std::nullopt;
    const std::string_view t_part = stem.substr(t_sep + 2);
    if (t_part.empty() || t_part[0] != 'T') return std::nullopt;
    const auto temperature = parse_temperature(t_part.substr(1));
    if (!temperature) return std::nullopt;

    const size_t r_sep = stem.rfind("__", t_sep - 1);
    if (r_sep == std::string_view::npos) return std::nullopt;
    const std::string_view r_part = stem.substr(r_sep + 2, t_sep - r_sep - 2);
    if (r_part.size() < 3 || r_part.substr(0, 2) != "1-") return std::nullopt;
    const auto upper = parse_int(r_part.substr(2));
    if (!upper || *upper < 2) return std::nullopt;

    const size_t l_sep = stem.rfind("__", r_sep - 1);
    if (l_sep == std::string_view::npos || l_sep == 0) return std::nullopt;
    const auto language = language_from_code(stem.substr(l_sep + 2, r_sep - l_sep - 2));
    if (!language) return std::nullopt;

    Cell cell;
    cell.provider = std::string(stem.substr(0, l_sep));
    cell.language = *language;
    cell.range_upper = static_cast<int>(*upper);
    cell.temperature = *temperature;
    return cell;
}

std::string csv_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case ',': out += "\\,"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string csv_unescape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\' || i + 1 >= text.size()) {
            out.push_back(text[i]);
            continue;
        }
        const char next = text[++i];
        switch (next) {
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case '\\': out.push_back('\\'); break;
            case ',': out.push_back(','); break;
            default:
                out.push_back('\\');
                out.push_back(next);
        }
    }
    return out;
}

std::string iso8601_now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    const auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                            now.time_since_epoch())
                            .count() %
                        1000;
    std::tm utc{};
    gmtime_r(&seconds, &utc);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                  utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min,
                  utc.tm_sec, static_cast<int>(millis));
    return buf;
}

std::string format_csv_record(const CallRecord& record) {
    std::string line = std::to_string(record.call_index);
    line += ',';
    line += record.timestamp;
    line += ',';
    line += call_status_name(record.status);
    line += ',';
    if (record.parsed_value) line += std::to_string(*record.parsed_value);
    line += ',';
    line += record.think_present ? "true" : "false";
    line += ',';
    line += csv_escape(record.raw_text);
    return line;
}

std::optional<CallRecord> parse_csv_record(std::string_view line) {
    const auto fields = split_unescaped(line);
    if (fields.size() != 6) return std::nullopt;
    const auto call_index = parse_int(fields[0]);
    if (!call_index || *call_index < 0) return std::nullopt;
    const auto status = call_status_from_name(fields[2]);
    if (!status) return std::nullopt;
    std::optional<int64_t> parsed_value;
    if (!fields[3].empty()) {
        parsed_value = parse_int(fields[3]);
        if (!parsed_value) return std::nullopt;
    }
    if (fields[4] != "true" && fields[4] != "false") return std::nullopt;

    CallRecord record;
    record.call_index = *call_index;
    record.timestamp = std::string(fields[1]);
    record.status = *status;
    record.parsed_value = parsed_value;
    record.think_present = fields[4] == "true";
    record.raw_text = csv_unescape(fields[5]);
    return record;
}

namespace {

struct CsvScan {
    std::vector<CallRecord> records;
    bool needs_truncation = false;
    size_t good_bytes = 0;  // byte length of header + valid records
};

// Reads a cell CSV, stopping at the first malformed or unterminated line.
CsvScan scan_csv(const std::string& path) {
    CsvScan scan;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Storage, "cannot open cell file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());

    size_t pos = 0;
    bool saw_header = false;
    while (pos < content.size()) {
        const size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) {
            scan.needs_truncation = true;  // torn trailing line
            break;
        }
        const std::string_view line(content.data() + pos, eol - pos);
        if (!saw_header) {
            if (line != kCsvHeader) {
                scan.needs_truncation = true;
                break;
            }
            saw_header = true;
        } else {
            auto record = parse_csv_record(line);
            if (!record) {
                scan.needs_truncation = true;
                break;
            }
            scan.records.push_back(std::move(*record));
        }
        pos = eol + 1;
        scan.good_bytes = pos;
    }
    if (!saw_header && !scan.records.empty()) scan.records.clear();
    return scan;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw Error(Errc::Storage, "cannot write file: " + path);
}

nlohmann::json transcript_json(int64_t call_index, const std::string& raw_text,
                               const std::optional<std::string>& think_text) {
    nlohmann::json record{{"call_index", call_index}, {"raw_text", raw_text}};
    if (think_text)
        record["think_text"] = *think_text;
    else
        record["think_text"] = nullptr;
    return record;
}

}  // namespace

CellStoreWriter::CellStoreWriter(const std::string& store_dir, const Cell& cell) {
    const std::string stem = (fs::path(store_dir) / cell_file_stem(cell)).string();
    csv_path_ = stem + ".csv";
    jsonl_path_ = stem + ".jsonl";

    std::error_code ec;
    fs::create_directories(store_dir, ec);
    if (ec) throw Error(Errc::Storage, "cannot create store directory: " + store_dir);

    std::vector<CallRecord> records;
    if (fs::exists(csv_path_)) {
        CsvScan scan = scan_csv(csv_path_);
        if (scan.needs_truncation || scan.good_bytes == 0) {
            std::string repaired = std::string(kCsvHeader) + "\n";
            for (const auto& record : scan.records)
                repaired += format_csv_record(record) + "\n";
            write_text_file(csv_path_, repaired);
        }
        records = std::move(scan.records);
    } else {
        write_text_file(csv_path_, std::string(kCsvHeader) + "\n");
    }
    for (const auto& record : records) existing_.insert(record.call_index);

    // The JSONL sibling is derived data; rebuild it whenever it disagrees
    // with the CSV (missing, behind, or torn).
    bool rebuild = !fs::exists(jsonl_path_);
    if (!rebuild) {
        std::set<int64_t> jsonl_indices;
        std::ifstream in(jsonl_path_, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
            if (doc.is_discarded() || !doc.contains("call_index")) {
                rebuild = true;
                break;
            }
            jsonl_indices.insert(doc.at("call_index").get<int64_t>());
        }
        if (!rebuild && jsonl_indices != existing_) rebuild = true;
    }
    if (rebuild) {
        std::string content;
        for (const auto& record : records) {
            auto [think, remainder] = extract_think(record.raw_text);
            content += transcript_json(record.call_index, record.raw_text, think).dump();
            content += '\n';
        }
        write_text_file(jsonl_path_, content);
    }

    csv_.open(csv_path_, std::ios::binary | std::ios::app);
    jsonl_.open(jsonl_path_, std::ios::binary | std::ios::app);
    if (!csv_ || !jsonl_)
        throw Error(Errc::Storage, "cannot open cell files for append: " + stem);
}

void CellStoreWriter::append(const CallRecord& record,
                             const std::optional<std::string>& think_text) {
    csv_ << format_csv_record(record) << '\n';
    csv_.flush();
    if (!csv_) throw Error(Errc::Storage, "write failed: " + csv_path_);
    jsonl_ << transcript_json(record.call_index, record.raw_text, think_text).dump() << '\n';
    jsonl_.flush();
    if (!jsonl_) throw Error(Errc::Storage, "write failed: " + jsonl_path_);
    existing_.insert(record.call_index);
}

std::vector<CallRecord> read_cell_records(const std::string& csv_path) {
    CsvScan scan = scan_csv(csv_path);
    return std::move(scan.records);
}

std::vector<Transcript> read_cell_transcripts(const std::string& jsonl_path) {
    std::ifstream in(jsonl_path, std::ios::binary);
    if (!in) throw Error(Errc::Storage, "cannot open transcript file: " + jsonl_path);
    std::vector<Transcript> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
        if (doc.is_discarded()) continue;  // torn tail
        Transcript t;
        t.call_index = doc.value("call_index", int64_t{0});
        t.raw_text = doc.value("raw_text", std::string());
        if (doc.contains("think_text") && !doc.at("think_text").is_null())
            t.think_text = doc.at("think_text").get<std::string>();
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::string> list_cell_stems(const std::string& store_dir) {
    std::vector<std::string> stems;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(store_dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const fs::path path = entry.path();
        if (path.extension() != ".csv") continue;
        const std::string stem = path.stem().string();
        if (parse_cell_stem(stem)) stems.push_back(stem);
    }
    if (ec) throw Error(Errc::Storage, "cannot list store directory: " + store_dir);
    std::sort(stems.begin(), stems.end());
    return stems;
}

void write_run_manifest(const std::string& store_dir, const RunManifest& manifest) {
    std::error_code ec;
    fs::create_directories(store_dir, ec);
    if (ec) throw Error(Errc::Storage, "cannot create store directory: " + store_dir);

    nlohmann::json doc;
    doc["run_id"] = manifest.run_id;
    doc["seed"] = manifest.seed;
    doc["calls_per_cell"] = manifest.calls_per_cell;
    doc["providers"] = manifest.providers;
    doc["languages"] = nlohmann::json::array();
    for (Language language : manifest.languages)
        doc["languages"].push_back(std::string(language_code(language)));
    doc["ranges"] = manifest.ranges;
    doc["temperatures"] = nlohmann::json::array();
    for (double t : manifest.temperatures) doc["temperatures"].push_back(format_temperature(t));

    write_text_file((fs::path(store_dir) / "run_manifest.json").string(), doc.dump(2) + "\n");
}

std::optional<RunManifest> read_run_manifest(const std::string& store_dir) {
    const std::string path = (fs::path(store_dir) / "run_manifest.json").string();
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::Storage, "run manifest is not valid JSON: " + path);
    }
    RunManifest manifest;
    manifest.run_id = doc.value("run_id", std::string());
    manifest.seed = doc.value("seed", uint64_t{0});
    manifest.calls_per_cell = doc.value("calls_per_cell", int64_t{0});
    manifest.providers = doc.value("providers", std::vector<std::string>{});
    for (const auto& code : doc.value("languages", std::vector<std::string>{})) {
        const auto language = language_from_code(code);
        if (!language) throw Error(Errc::Storage, "manifest has unknown language: " + code);
        manifest.languages.push_back(*language);
    }
    manifest.ranges = doc.value("ranges", std::vector<int>{});
    for (const auto& t : doc.value("temperatures", std::vector<std::string>{})) {
        const auto value = parse_temperature(t);
        if (!value) throw Error(Errc::Storage, "manifest has unknown temperature: " + t);
        manifest.temperatures.push_back(*value);
    }
    return manifest;
}

}  // namespace rngaudit
