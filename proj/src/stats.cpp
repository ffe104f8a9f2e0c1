#include "rngaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rngaudit/errors.hpp"
#include "rngaudit/incgamma.hpp"
#include "rngaudit/rng.hpp"

namespace rngaudit {

Histogram Histogram::with_range(int upper) {
    if (upper < 2) throw std::invalid_argument("histogram range must have at least 2 bins");
    Histogram h;
    h.upper = upper;
    h.counts.assign(static_cast<size_t>(upper), 0);
    return h;
}

Histogram Histogram::from_counts(std::vector<int64_t> counts) {
    if (counts.size() < 2) throw std::invalid_argument("histogram range must have at least 2 bins");
    Histogram h;
    h.upper = static_cast<int>(counts.size());
    h.counts = std::move(counts);
    for (int64_t c : h.counts) {
        if (c < 0) throw std::invalid_argument("histogram counts must be non-negative");
        h.n_ok += c;
    }
    return h;
}

void Histogram::add(int64_t value) {
    if (value < 1 || value > upper) {
        ++n_out_of_range;
        return;
    }
    ++counts[static_cast<size_t>(value - 1)];
    ++n_ok;
}

int64_t Histogram::distinct_values() const {
    int64_t d = 0;
    for (int64_t c : counts)
        if (c > 0) ++d;
    return d;
}

ChiSquareResult chi_square_uniform(const Histogram& hist) {
    if (hist.n_ok == 0) throw Error(Errc::EmptyCell, "chi-square needs at least one in-range value");
    ChiSquareResult r;
    const int k = hist.upper;
    r.dof = k - 1;
    const double expected = static_cast<double>(hist.n_ok) / k;
    double chi2 = 0.0;
    for (int64_t c : hist.counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    r.chi2 = chi2;
    r.p_value = regularized_gamma_q(r.dof / 2.0, chi2 / 2.0);
    return r;
}

double cramers_v(double chi2, int64_t n, int k) {
    if (n <= 0 || k < 2) return 0.0;
    const double v = std::sqrt(chi2 / (static_cast<double>(n) * (k - 1)));
    return std::clamp(v, 0.0, 1.0);
}

double shannon_entropy_norm(const Histogram& hist, EntropyNorm norm) {
    const int64_t distinct = hist.distinct_values();
    const int64_t n = norm == EntropyNorm::RangeSize ? hist.upper : distinct;
    if (distinct <= 1 || n <= 1 || hist.n_ok == 0) return 0.0;
    const double total = static_cast<double>(hist.n_ok);
    double h = 0.0;
    for (int64_t c : hist.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h / std::log2(static_cast<double>(n));
}

namespace {

struct Moments {
    double mean = 0.0;
    double std_dev = 0.0;
};

Moments population_moments(const Histogram& hist) {
    Moments m;
    if (hist.n_ok == 0) return m;
    const double total = static_cast<double>(hist.n_ok);
    double sum = 0.0;
    for (int v = 1; v <= hist.upper; ++v)
        sum += static_cast<double>(v) * static_cast<double>(hist.counts[static_cast<size_t>(v - 1)]);
    m.mean = sum / total;
    double ss = 0.0;
    for (int v = 1; v <= hist.upper; ++v) {
        const double d = static_cast<double>(v) - m.mean;
        ss += d * d * static_cast<double>(hist.counts[static_cast<size_t>(v - 1)]);
    }
    m.std_dev = std::sqrt(ss / total);
    return m;
}

}  // namespace

double randomness_index(const Histogram& hist, double temperature, EntropyNorm norm) {
    if (temperature <= 0.0) throw Error(Errc::InvalidTemperature, "temperature must be positive");
    const int64_t unique = hist.distinct_values();
    if (unique <= 1 || hist.n_ok == 0) return 0.0;
    const Moments m = population_moments(hist);
    if (m.mean == 0.0) return 0.0;
    const double r_star = static_cast<double>(unique) / hist.upper;
    const double sigma_star = m.std_dev / m.mean;
    const double h_norm = shannon_entropy_norm(hist, norm);
    return (r_star * sigma_star * h_norm) /
           (std::log(static_cast<double>(hist.upper)) * std::sqrt(temperature));
}

CellStats compute_cell_stats(const Histogram& hist, double temperature, EntropyNorm norm) {
    CellStats s;
    s.temperature = temperature;
    const Moments m = population_moments(hist);
    s.mean = m.mean;
    s.std_dev = m.std_dev;
    s.sigma_star = m.mean != 0.0 ? m.std_dev / m.mean : 0.0;
    s.unique_count = hist.distinct_values();
    s.r_star = static_cast<double>(s.unique_count) / hist.upper;
    s.h_norm = shannon_entropy_norm(hist, norm);
    const ChiSquareResult chi = chi_square_uniform(hist);
    s.chi2 = chi.chi2;
    s.dof = chi.dof;
    s.p_value = chi.p_value;
    s.cramers_v = cramers_v(chi.chi2, hist.n_ok, hist.upper);
    s.randomness_index = randomness_index(hist, temperature, norm);
    return s;
}

std::vector<CellStats> baseline_uniform_runs(int k, int64_t n_samples, int n_runs,
                                             uint64_t seed) {
    if (k < 2) throw std::invalid_argument("baseline range must have at least 2 bins");
    if (n_samples <= 0 || n_runs <= 0)
        throw std::invalid_argument("baseline needs positive samples and runs");
    std::vector<CellStats> out;
    out.reserve(static_cast<size_t>(n_runs));
    for (int run = 0; run < n_runs; ++run) {
        std::mt19937_64 gen(mix64(seed, static_cast<uint64_t>(run) + 1));
        Histogram h = Histogram::with_range(k);
        for (int64_t i = 0; i < n_samples; ++i)
            h.add(1 + static_cast<int64_t>(bounded_uniform(gen, static_cast<uint64_t>(k))));
        out.push_back(compute_cell_stats(h, 1.0));
    }
    return out;
}

}  // namespace rngaudit
