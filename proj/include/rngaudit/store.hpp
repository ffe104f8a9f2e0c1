#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rngaudit/call_status.hpp"
#include "rngaudit/language.hpp"

namespace rngaudit {

/// Identity of one experimental condition.
struct Cell {
    std::string provider;
    Language language = Language::EN;
    int range_upper = 100;
    double temperature = 1.0;

    friend bool operator==(const Cell& a, const Cell& b) = default;
};

/// Deterministic expansion order: provider name, language code, range upper,
/// temperature.
bool cell_less(const Cell& a, const Cell& b);

struct CallRecord {
    int64_t call_index = 0;
    std::string timestamp;  // ISO-8601 UTC
    CallStatus status = CallStatus::Unparsable;
    std::optional<int64_t> parsed_value;
    bool think_present = false;
    std::string raw_text;
};

struct Transcript {
    int64_t call_index = 0;
    std::string raw_text;
    std::optional<std::string> think_text;
};

/// File stem for a cell: `<provider>__<lang>__1-<upper>__T<temp>`. Parsed
/// from the right so provider names may contain double underscores.
std::string cell_file_stem(const Cell& cell);
std::optional<Cell> parse_cell_stem(std::string_view stem);

/// Raw-text escaping for the CSV column: backslash, newline, carriage return
/// and comma become \\ \n \r \, so one record is always one line.
std::string csv_escape(std::string_view text);
std::string csv_unescape(std::string_view text);

std::string iso8601_now_utc();

extern const char* const kCsvHeader;

/// Append-only writer for one cell (CSV + sibling JSONL transcript). On open
/// it truncates a torn trailing CSV line and rebuilds the JSONL sibling from
/// the CSV (the CSV is authoritative; think text is re-derived from raw text).
class CellStoreWriter {
public:
    CellStoreWriter(const std::string& store_dir, const Cell& cell);

    const std::set<int64_t>& existing_indices() const { return existing_; }
    const std::string& csv_path() const { return csv_path_; }

    /// Writes the CSV line first (flushed), then the JSONL line (flushed).
    void append(const CallRecord& record, const std::optional<std::string>& think_text);

private:
    std::string csv_path_;
    std::string jsonl_path_;
    std::set<int64_t> existing_;
    std::ofstream csv_;
    std::ofstream jsonl_;
};

std::string format_csv_record(const CallRecord& record);
std::optional<CallRecord> parse_csv_record(std::string_view line);

std::vector<CallRecord> read_cell_records(const std::string& csv_path);
std::vector<Transcript> read_cell_transcripts(const std::string& jsonl_path);

/// Cell stems (sorted) of all parseable per-cell CSV files in a store.
std::vector<std::string> list_cell_stems(const std::string& store_dir);

struct RunManifest {
    std::string run_id;
    uint64_t seed = 0;
    int64_t calls_per_cell = 0;
    std::vector<std::string> providers;  // names only
    std::vector<Language> languages;
    std::vector<int> ranges;
    std::vector<double> temperatures;

    friend bool operator==(const RunManifest& a, const RunManifest& b) = default;
};

void write_run_manifest(const std::string& store_dir, const RunManifest& manifest);
std::optional<RunManifest> read_run_manifest(const std::string& store_dir);

}  // namespace rngaudit
