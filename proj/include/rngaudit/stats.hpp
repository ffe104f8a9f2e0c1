#pragma once

#include <cstdint>
#include <vector>

namespace rngaudit {

/// Tally of parsed responses for one experimental cell over [1, upper].
/// Only in-range values enter counts; out-of-range, unparsable and
/// provider-error calls are tracked separately and never feed statistics.
struct Histogram {
    int upper = 0;  // range size k; the lower bound is always 1
    std::vector<int64_t> counts;
    int64_t n_ok = 0;  // in-range observations, == sum(counts)
    int64_t n_out_of_range = 0;
    int64_t n_unparsable = 0;
    int64_t n_error = 0;

    static Histogram with_range(int upper);
    static Histogram from_counts(std::vector<int64_t> counts);

    void add(int64_t value);
    int64_t distinct_values() const;
};

struct ChiSquareResult {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Which n feeds log2(n) in the entropy normalization: the number of
/// distinct observed values (default) or the full range size.
enum class EntropyNorm { DistinctObserved, RangeSize };

/// Goodness-of-fit test against the uniform distribution over [1, upper].
/// All k bins contribute, zero counts included; p = Q(dof/2, chi2/2).
ChiSquareResult chi_square_uniform(const Histogram& hist);

/// One-dimensional goodness-of-fit form sqrt(chi2 / (n * (k - 1))),
/// clamped to [0, 1].
double cramers_v(double chi2, int64_t n, int k);

/// Normalized Shannon entropy in [0, 1]; 0 when at most one value occurs.
double shannon_entropy_norm(const Histogram& hist,
                            EntropyNorm norm = EntropyNorm::DistinctObserved);

/// Composite index (R* . sigma* . H_norm) / (ln k . sqrt T); 0 whenever
/// fewer than two distinct values were observed.
double randomness_index(const Histogram& hist, double temperature,
                        EntropyNorm norm = EntropyNorm::DistinctObserved);

struct CellStats {
    double mean = 0.0;
    double std_dev = 0.0;     // population standard deviation
    double sigma_star = 0.0;  // std_dev / mean
    int64_t unique_count = 0;
    double r_star = 0.0;  // unique_count / k
    double h_norm = 0.0;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double cramers_v = 0.0;
    double temperature = 1.0;
    double randomness_index = 0.0;
};

CellStats compute_cell_stats(const Histogram& hist, double temperature,
                             EntropyNorm norm = EntropyNorm::DistinctObserved);

/// Seeded pseudo-random uniform baseline: n_runs histograms of n_samples
/// draws from [1, k], each reduced to CellStats at T = 1.
std::vector<CellStats> baseline_uniform_runs(int k, int64_t n_samples, int n_runs,
                                             uint64_t seed);

}  // namespace rngaudit
