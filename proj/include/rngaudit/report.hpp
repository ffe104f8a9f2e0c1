#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rngaudit/stats.hpp"
#include "rngaudit/store.hpp"

namespace rngaudit {

/// One store cell reduced for reporting. stats is absent when the cell fails
/// the validity threshold; such cells render as "--", never as 0.
struct StatsRow {
    Cell cell;
    int64_t n_ok = 0;
    int64_t n_out_of_range = 0;
    int64_t n_unparsable = 0;  // unparsable plus provider-error calls
    std::optional<CellStats> stats;
};

/// Reads every cell and computes stats for the valid ones. A cell is valid
/// with at least min_valid in-range parses; min_valid <= 0 selects the
/// default ceil(calls/2), where calls comes from the manifest when present,
/// else from the cell's own record count. Unreadable store -> storage error.
std::vector<StatsRow> summarize_store(const std::string& store_dir,
                                      int64_t min_valid = 0,
                                      EntropyNorm norm = EntropyNorm::DistinctObserved);

inline constexpr std::string_view kStatsCsvHeader =
    "provider,language,range_upper,temperature,n_ok,n_out_of_range,"
    "n_unparsable,unique_count,mean,std,r_star,sigma_star,h_norm,chi2,dof,"
    "p_value,cramers_v,randomness_index";

/// Stats CSV round-trip; metric columns of absent cells hold "--".
std::string format_stats_csv(const std::vector<StatsRow>& rows);
std::vector<StatsRow> parse_stats_csv(const std::string& path);

enum class TableMetric {
    RandomnessIndex,
    PValue,
    CramersV,
    HNorm,
    Mean,
    StdDev,
};

/// Accepts ri, p, v, h, mean, std (and the long spellings used in headers).
std::optional<TableMetric> table_metric_from_name(std::string_view name);
std::string_view table_metric_name(TableMetric metric);

/// Provider x language grid of a metric averaged over temperatures (and over
/// ranges unless the caller filtered). Averages cover present cells only.
struct AggregateTable {
    TableMetric metric = TableMetric::RandomnessIndex;
    std::vector<std::string> providers;  // rows, sorted
    std::vector<Language> languages;     // columns, sorted by code
    std::vector<std::vector<std::optional<double>>> values;
    std::vector<std::optional<double>> row_avg;
    std::vector<std::optional<double>> col_avg;
    std::optional<double> overall_avg;  // mean over all present grid values
};

AggregateTable aggregate_table(const std::vector<StatsRow>& rows,
                               TableMetric metric = TableMetric::RandomnessIndex,
                               std::optional<int> range_upper = std::nullopt);

/// Paper-style table rounding: two decimals at |v| >= 0.01, three below;
/// absent values render as "--".
std::string format_table_value(std::optional<double> value);

std::string render_table_csv(const AggregateTable& table);
std::string render_table_md(const AggregateTable& table);

/// Value-frequency by temperature for one (provider, language, range).
/// Rows are the temperatures found in the store, ascending; each row's
/// counts sum to that cell's n_ok.
struct HeatmapMatrix {
    int upper = 0;
    std::vector<double> temperatures;
    std::vector<std::vector<int64_t>> counts;  // [row][value-1]
    std::vector<int64_t> row_n_ok;
};

/// Errors: nothing matches the selector -> empty-selection error.
HeatmapMatrix heatmap_matrix(const std::string& store_dir,
                             const std::string& provider, Language language,
                             int range_upper);

enum class HeatmapNorm { Absolute, RowMax };
std::optional<HeatmapNorm> heatmap_norm_from_name(std::string_view name);

/// Absolute keeps raw counts; RowMax rescales each row to [0, 1] by its own
/// maximum (all-zero rows stay zero).
std::vector<std::vector<double>> normalize_heatmap(const HeatmapMatrix& matrix,
                                                   HeatmapNorm norm);

std::string render_matrix_csv(const HeatmapMatrix& matrix, HeatmapNorm norm);

/// Deterministic SVG: one class="c" rectangle per (temperature, value) cell,
/// white -> #1f4e8c linear color scale (absolute scale saturates at 100),
/// axis labels and a color bar. Byte-stable for identical inputs.
std::string render_heatmap_svg(const HeatmapMatrix& matrix, HeatmapNorm norm);

enum class GroupBy { Provider, Language, Range, Temperature };
std::optional<GroupBy> group_by_from_name(std::string_view name);

/// Five-number summary plus mean of all in-range values per group; quartiles
/// by linear interpolation between order statistics; outliers are the
/// distinct values outside 1.5 x IQR.
struct GroupSummary {
    std::string group;
    int64_t n = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
    std::vector<int64_t> outliers;
};

std::vector<GroupSummary> distribution_summary(const std::string& store_dir,
                                               GroupBy group_by);

/// Linear-interpolation quantile over a sorted sample, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

inline constexpr std::string_view kGroupCsvHeader =
    "group,n,min,q1,median,q3,max,mean,outliers";
std::string format_group_csv(const std::vector<GroupSummary>& groups);

inline constexpr std::string_view kBaselineCsvHeader =
    "run,unique_count,mean,std,r_star,sigma_star,h_norm,chi2,dof,p_value,"
    "cramers_v,randomness_index";
std::string format_baseline_csv(const std::vector<CellStats>& runs);

}  // namespace rngaudit
