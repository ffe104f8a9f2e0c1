#include "rngaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rngaudit/errors.hpp"
#include "rngaudit/format.hpp"

namespace fs = std::filesystem;

namespace rngaudit {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double metric_value(const CellStats& stats, TableMetric metric) {
    switch (metric) {
        case TableMetric::RandomnessIndex: return stats.randomness_index;
        case TableMetric::PValue: return stats.p_value;
        case TableMetric::CramersV: return stats.cramers_v;
        case TableMetric::HNorm: return stats.h_norm;
        case TableMetric::Mean: return stats.mean;
        case TableMetric::StdDev: return stats.std_dev;
    }
    return 0.0;
}

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<StatsRow> summarize_store(const std::string& store_dir,
                                      int64_t min_valid, EntropyNorm norm) {
    if (!fs::is_directory(store_dir))
        throw Error(Errc::Storage, "store directory not found: " + store_dir);
    const auto manifest = read_run_manifest(store_dir);

    std::vector<StatsRow> rows;
    for (const std::string& stem : list_cell_stems(store_dir)) {
        const auto cell = parse_cell_stem(stem);
        if (!cell) continue;
        const auto records =
            read_cell_records((fs::path(store_dir) / (stem + ".csv")).string());

        Histogram hist = Histogram::with_range(cell->range_upper);
        for (const CallRecord& r : records) {
            if (r.parsed_value)
                hist.add(*r.parsed_value);
            else if (r.status == CallStatus::ProviderError)
                ++hist.n_error;
            else
                ++hist.n_unparsable;
        }

        const int64_t calls = manifest ? manifest->calls_per_cell
                                       : static_cast<int64_t>(records.size());
        const int64_t threshold = min_valid > 0 ? min_valid : (calls + 1) / 2;

        StatsRow row;
        row.cell = *cell;
        row.n_ok = hist.n_ok;
        row.n_out_of_range = hist.n_out_of_range;
        row.n_unparsable = hist.n_unparsable + hist.n_error;
        if (hist.n_ok >= threshold && hist.n_ok > 0)
            row.stats = compute_cell_stats(hist, cell->temperature, norm);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_stats_csv(const std::vector<StatsRow>& rows) {
    std::ostringstream out;
    out << kStatsCsvHeader << '\n';
    for (const StatsRow& row : rows) {
        out << row.cell.provider << ',' << language_code(row.cell.language) << ','
            << row.cell.range_upper << ',' << format_temperature(row.cell.temperature)
            << ',' << row.n_ok << ',' << row.n_out_of_range << ','
            << row.n_unparsable << ',';
        if (row.stats) {
            const CellStats& s = *row.stats;
            out << s.unique_count << ',' << fmt_double(s.mean) << ','
                << fmt_double(s.std_dev) << ',' << fmt_double(s.r_star) << ','
                << fmt_double(s.sigma_star) << ',' << fmt_double(s.h_norm) << ','
                << fmt_double(s.chi2) << ',' << s.dof << ','
                << fmt_double(s.p_value) << ',' << fmt_double(s.cramers_v) << ','
                << fmt_double(s.randomness_index);
        } else {
            out << "--,--,--,--,--,--,--,--,--,--,--";
        }
        out << '\n';
    }
    return out.str();
}

std::vector<StatsRow> parse_stats_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Usage, "cannot read stats csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kStatsCsvHeader)
        throw Error(Errc::Usage, "bad stats csv header in " + path);

    std::vector<StatsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 18)
            throw Error(Errc::Usage, "bad stats csv row: " + line);
        StatsRow row;
        row.cell.provider = f[0];
        row.cell.language = require_language(f[1]);
        row.cell.range_upper = std::stoi(f[2]);
        const auto temp = parse_temperature(f[3]);
        if (!temp) throw Error(Errc::Usage, "bad temperature in row: " + line);
        row.cell.temperature = *temp;
        row.n_ok = std::stoll(f[4]);
        row.n_out_of_range = std::stoll(f[5]);
        row.n_unparsable = std::stoll(f[6]);
        if (f[7] != "--") {
            CellStats s;
            s.unique_count = std::stoll(f[7]);
            s.mean = std::stod(f[8]);
            s.std_dev = std::stod(f[9]);
            s.r_star = std::stod(f[10]);
            s.sigma_star = std::stod(f[11]);
            s.h_norm = std::stod(f[12]);
            s.chi2 = std::stod(f[13]);
            s.dof = std::stoi(f[14]);
            s.p_value = std::stod(f[15]);
            s.cramers_v = std::stod(f[16]);
            s.randomness_index = std::stod(f[17]);
            s.temperature = row.cell.temperature;
            row.stats = s;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<TableMetric> table_metric_from_name(std::string_view name) {
    if (name == "ri" || name == "randomness_index") return TableMetric::RandomnessIndex;
    if (name == "p" || name == "p_value") return TableMetric::PValue;
    if (name == "v" || name == "cramers_v") return TableMetric::CramersV;
    if (name == "h" || name == "h_norm") return TableMetric::HNorm;
    if (name == "mean") return TableMetric::Mean;
    if (name == "std" || name == "std_dev") return TableMetric::StdDev;
    return std::nullopt;
}

std::string_view table_metric_name(TableMetric metric) {
    switch (metric) {
        case TableMetric::RandomnessIndex: return "randomness_index";
        case TableMetric::PValue: return "p_value";
        case TableMetric::CramersV: return "cramers_v";
        case TableMetric::HNorm: return "h_norm";
        case TableMetric::Mean: return "mean";
        case TableMetric::StdDev: return "std_dev";
    }
    return "randomness_index";
}

AggregateTable aggregate_table(const std::vector<StatsRow>& rows,
                               TableMetric metric,
                               std::optional<int> range_upper) {
    AggregateTable table;
    table.metric = metric;

    std::set<std::string> providers;
    std::set<Language> languages;
    std::map<std::pair<std::string, Language>, std::vector<double>> values;
    for (const StatsRow& row : rows) {
        if (range_upper && row.cell.range_upper != *range_upper) continue;
        providers.insert(row.cell.provider);
        languages.insert(row.cell.language);
        if (row.stats)
            values[{row.cell.provider, row.cell.language}].push_back(
                metric_value(*row.stats, metric));
    }
    table.providers.assign(providers.begin(), providers.end());
    table.languages.assign(languages.begin(), languages.end());

    std::vector<double> all_present;
    table.values.resize(table.providers.size());
    table.row_avg.resize(table.providers.size());
    for (size_t r = 0; r < table.providers.size(); ++r) {
        table.values[r].resize(table.languages.size());
        std::vector<double> row_present;
        for (size_t c = 0; c < table.languages.size(); ++c) {
            const auto it =
                values.find({table.providers[r], table.languages[c]});
            if (it != values.end()) {
                table.values[r][c] = mean_of(it->second);
                row_present.push_back(*table.values[r][c]);
                all_present.push_back(*table.values[r][c]);
            }
        }
        table.row_avg[r] = mean_of(row_present);
    }
    table.col_avg.resize(table.languages.size());
    for (size_t c = 0; c < table.languages.size(); ++c) {
        std::vector<double> col_present;
        for (size_t r = 0; r < table.providers.size(); ++r)
            if (table.values[r][c]) col_present.push_back(*table.values[r][c]);
        table.col_avg[c] = mean_of(col_present);
    }
    table.overall_avg = mean_of(all_present);
    return table;
}

std::string format_table_value(std::optional<double> value) {
    if (!value) return "--";
    char buf[40];
    std::snprintf(buf, sizeof buf, std::fabs(*value) >= 0.01 ? "%.2f" : "%.3f",
                  *value);
    return buf;
}

std::string render_table_csv(const AggregateTable& table) {
    std::ostringstream out;
    out << "provider";
    for (Language lang : table.languages) out << ',' << language_code(lang);
    out << ",model_avg\n";
    for (size_t r = 0; r < table.providers.size(); ++r) {
        out << table.providers[r];
        for (size_t c = 0; c < table.languages.size(); ++c)
            out << ',' << format_table_value(table.values[r][c]);
        out << ',' << format_table_value(table.row_avg[r]) << '\n';
    }
    out << "language_avg";
    for (size_t c = 0; c < table.languages.size(); ++c)
        out << ',' << format_table_value(table.col_avg[c]);
    out << ',' << format_table_value(table.overall_avg) << '\n';
    return out.str();
}

std::string render_table_md(const AggregateTable& table) {
    std::ostringstream out;
    out << "| provider |";
    for (Language lang : table.languages) out << ' ' << language_code(lang) << " |";
    out << " model avg |\n|---|";
    for (size_t c = 0; c < table.languages.size(); ++c) out << "---|";
    out << "---|\n";
    for (size_t r = 0; r < table.providers.size(); ++r) {
        out << "| " << table.providers[r] << " |";
        for (size_t c = 0; c < table.languages.size(); ++c)
            out << ' ' << format_table_value(table.values[r][c]) << " |";
        out << ' ' << format_table_value(table.row_avg[r]) << " |\n";
    }
    out << "| language avg |";
    for (size_t c = 0; c < table.languages.size(); ++c)
        out << ' ' << format_table_value(table.col_avg[c]) << " |";
    out << ' ' << format_table_value(table.overall_avg) << " |\n";
    return out.str();
}

HeatmapMatrix heatmap_matrix(const std::string& store_dir,
                             const std::string& provider, Language language,
                             int range_upper) {
    if (!fs::is_directory(store_dir))
        throw Error(Errc::Storage, "store directory not found: " + store_dir);

    std::map<double, std::vector<int64_t>> by_temperature;
    for (const std::string& stem : list_cell_stems(store_dir)) {
        const auto cell = parse_cell_stem(stem);
        if (!cell || cell->provider != provider || cell->language != language ||
            cell->range_upper != range_upper)
            continue;
        Histogram hist = Histogram::with_range(range_upper);
        for (const CallRecord& r : read_cell_records(
                 (fs::path(store_dir) / (stem + ".csv")).string()))
            if (r.parsed_value) hist.add(*r.parsed_value);
        by_temperature[cell->temperature] = hist.counts;
    }
    if (by_temperature.empty())
        throw Error(Errc::EmptySelection,
                    "no cells match " + provider + "/" +
                        std::string(language_code(language)) + "/1-" +
                        std::to_string(range_upper));

    HeatmapMatrix matrix;
    matrix.upper = range_upper;
    for (auto& [temperature, counts] : by_temperature) {
        matrix.temperatures.push_back(temperature);
        int64_t n_ok = 0;
        for (int64_t c : counts) n_ok += c;
        matrix.row_n_ok.push_back(n_ok);
        matrix.counts.push_back(std::move(counts));
    }
    return matrix;
}

std::optional<HeatmapNorm> heatmap_norm_from_name(std::string_view name) {
    if (name == "abs" || name == "absolute") return HeatmapNorm::Absolute;
    if (name == "rowmax" || name == "row-max") return HeatmapNorm::RowMax;
    return std::nullopt;
}

std::vector<std::vector<double>> normalize_heatmap(const HeatmapMatrix& matrix,
                                                   HeatmapNorm norm) {
    std::vector<std::vector<double>> out(matrix.counts.size());
    for (size_t r = 0; r < matrix.counts.size(); ++r) {
        const auto& row = matrix.counts[r];
        out[r].resize(row.size());
        int64_t row_max = 0;
        for (int64_t c : row) row_max = std::max(row_max, c);
        for (size_t i = 0; i < row.size(); ++i) {
            if (norm == HeatmapNorm::Absolute)
                out[r][i] = static_cast<double>(row[i]);
            else
                out[r][i] = row_max > 0 ? static_cast<double>(row[i]) /
                                              static_cast<double>(row_max)
                                        : 0.0;
        }
    }
    return out;
}

std::string render_matrix_csv(const HeatmapMatrix& matrix, HeatmapNorm norm) {
    const auto values = normalize_heatmap(matrix, norm);
    std::ostringstream out;
    out << "temperature";
    for (int v = 1; v <= matrix.upper; ++v) out << ',' << v;
    out << '\n';
    for (size_t r = 0; r < values.size(); ++r) {
        out << format_temperature(matrix.temperatures[r]);
        for (double v : values[r]) {
            if (norm == HeatmapNorm::Absolute)
                out << ',' << static_cast<int64_t>(v);
            else {
                char buf[24];
                std::snprintf(buf, sizeof buf, "%.6f", v);
                out << ',' << buf;
            }
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::string heat_color(double frac) {
    frac = std::clamp(frac, 0.0, 1.0);
    const auto channel = [&](double from, double to) {
        return static_cast<int>(std::lround(from + (to - from) * frac));
    };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(255, 31),
                  channel(255, 78), channel(255, 140));
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_heatmap_svg(const HeatmapMatrix& matrix, HeatmapNorm norm) {
    const auto values = normalize_heatmap(matrix, norm);
    const size_t rows = matrix.counts.size();
    const int k = matrix.upper;

    const double left = 70.0, top = 30.0;
    const double plot_w = 600.0, row_h = 36.0;
    const double cell_w = plot_w / k;
    const double plot_h = row_h * static_cast<double>(rows);
    const double bar_x = left + plot_w + 30.0;
    const double width = bar_x + 80.0;
    const double height = top + plot_h + 60.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_coord(width)
        << "\" height=\"" << fmt_coord(height) << "\" viewBox=\"0 0 "
        << fmt_coord(width) << ' ' << fmt_coord(height) << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt_coord(width) << "\" height=\""
        << fmt_coord(height) << "\" fill=\"#ffffff\"/>\n";

    for (size_t r = 0; r < rows; ++r) {
        for (int c = 0; c < k; ++c) {
            const double value = values[r][static_cast<size_t>(c)];
            const double frac = norm == HeatmapNorm::Absolute
                                    ? std::min(value, 100.0) / 100.0
                                    : value;
            svg << "<rect class=\"c\" x=\"" << fmt_coord(left + c * cell_w)
                << "\" y=\"" << fmt_coord(top + static_cast<double>(r) * row_h)
                << "\" width=\"" << fmt_coord(cell_w) << "\" height=\""
                << fmt_coord(row_h) << "\" fill=\"" << heat_color(frac)
                << "\"/>\n";
        }
    }

    // Row labels: temperatures.
    for (size_t r = 0; r < rows; ++r)
        svg << "<text x=\"" << fmt_coord(left - 8.0) << "\" y=\""
            << fmt_coord(top + (static_cast<double>(r) + 0.5) * row_h + 4.0)
            << "\" font-size=\"12\" text-anchor=\"end\">T="
            << format_temperature(matrix.temperatures[r]) << "</text>\n";

    // Column labels: every value for small ranges, sparse ticks for 1-100.
    const int step = k <= 12 ? 1 : k / 10;
    for (int c = 1; c <= k; c += step)
        svg << "<text x=\"" << fmt_coord(left + (c - 0.5) * cell_w) << "\" y=\""
            << fmt_coord(top + plot_h + 16.0)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << c << "</text>\n";
    svg << "<text x=\"" << fmt_coord(left + plot_w / 2.0) << "\" y=\""
        << fmt_coord(top + plot_h + 40.0)
        << "\" font-size=\"13\" text-anchor=\"middle\">generated value</text>\n";

    // Color bar, 24 strips from bottom (0) to top (max).
    const int strips = 24;
    const double strip_h = plot_h / strips;
    for (int s = 0; s < strips; ++s) {
        const double frac = (static_cast<double>(s) + 0.5) / strips;
        svg << "<rect class=\"b\" x=\"" << fmt_coord(bar_x) << "\" y=\""
            << fmt_coord(top + plot_h - (s + 1) * strip_h) << "\" width=\"18\" height=\""
            << fmt_coord(strip_h) << "\" fill=\"" << heat_color(frac) << "\"/>\n";
    }
    const std::string bar_max = norm == HeatmapNorm::Absolute ? "100" : "1.0";
    svg << "<text x=\"" << fmt_coord(bar_x + 24.0) << "\" y=\""
        << fmt_coord(top + 10.0) << "\" font-size=\"12\">" << bar_max
        << "</text>\n";
    svg << "<text x=\"" << fmt_coord(bar_x + 24.0) << "\" y=\""
        << fmt_coord(top + plot_h) << "\" font-size=\"12\">0</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted.front();
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::optional<GroupBy> group_by_from_name(std::string_view name) {
    if (name == "provider") return GroupBy::Provider;
    if (name == "language") return GroupBy::Language;
    if (name == "range") return GroupBy::Range;
    if (name == "temperature") return GroupBy::Temperature;
    return std::nullopt;
}

std::vector<GroupSummary> distribution_summary(const std::string& store_dir,
                                               GroupBy group_by) {
    if (!fs::is_directory(store_dir))
        throw Error(Errc::Storage, "store directory not found: " + store_dir);

    std::map<std::string, std::vector<int64_t>> groups;
    for (const std::string& stem : list_cell_stems(store_dir)) {
        const auto cell = parse_cell_stem(stem);
        if (!cell) continue;
        std::string key;
        switch (group_by) {
            case GroupBy::Provider: key = cell->provider; break;
            case GroupBy::Language: key = std::string(language_code(cell->language)); break;
            case GroupBy::Range: key = "1-" + std::to_string(cell->range_upper); break;
            case GroupBy::Temperature: key = "T" + format_temperature(cell->temperature); break;
        }
        auto& values = groups[key];
        for (const CallRecord& r : read_cell_records(
                 (fs::path(store_dir) / (stem + ".csv")).string()))
            if (r.parsed_value && *r.parsed_value >= 1 &&
                *r.parsed_value <= cell->range_upper)
                values.push_back(*r.parsed_value);
    }

    std::vector<GroupSummary> out;
    for (auto& [key, values] : groups) {
        if (values.empty()) continue;
        std::sort(values.begin(), values.end());
        std::vector<double> sorted(values.begin(), values.end());
        GroupSummary g;
        g.group = key;
        g.n = static_cast<int64_t>(values.size());
        g.min = sorted.front();
        g.q1 = quantile_sorted(sorted, 0.25);
        g.median = quantile_sorted(sorted, 0.5);
        g.q3 = quantile_sorted(sorted, 0.75);
        g.max = sorted.back();
        double sum = 0.0;
        for (double v : sorted) sum += v;
        g.mean = sum / static_cast<double>(sorted.size());
        const double iqr = g.q3 - g.q1;
        const double lo = g.q1 - 1.5 * iqr, hi = g.q3 + 1.5 * iqr;
        std::set<int64_t> outliers;
        for (int64_t v : values)
            if (static_cast<double>(v) < lo || static_cast<double>(v) > hi)
                outliers.insert(v);
        g.outliers.assign(outliers.begin(), outliers.end());
        out.push_back(std::move(g));
    }
    return out;
}

std::string format_group_csv(const std::vector<GroupSummary>& groups) {
    std::ostringstream out;
    out << kGroupCsvHeader << '\n';
    for (const GroupSummary& g : groups) {
        out << g.group << ',' << g.n << ',' << fmt_double(g.min) << ','
            << fmt_double(g.q1) << ',' << fmt_double(g.median) << ','
            << fmt_double(g.q3) << ',' << fmt_double(g.max) << ','
            << fmt_double(g.mean) << ',';
        for (size_t i = 0; i < g.outliers.size(); ++i) {
            if (i) out << ';';
            out << g.outliers[i];
        }
        out << '\n';
    }
    return out.str();
}

std::string format_baseline_csv(const std::vector<CellStats>& runs) {
    std::ostringstream out;
    out << kBaselineCsvHeader << '\n';
    for (size_t i = 0; i < runs.size(); ++i) {
        const CellStats& s = runs[i];
        out << i << ',' << s.unique_count << ',' << fmt_double(s.mean) << ','
            << fmt_double(s.std_dev) << ',' << fmt_double(s.r_star) << ','
            << fmt_double(s.sigma_star) << ',' << fmt_double(s.h_norm) << ','
            << fmt_double(s.chi2) << ',' << s.dof << ',' << fmt_double(s.p_value)
            << ',' << fmt_double(s.cramers_v) << ','
            << fmt_double(s.randomness_index) << '\n';
    }
    return out.str();
}

}  // namespace rngaudit
