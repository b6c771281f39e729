#pragma once

// Two-stage sampling of random rationals (draw a denominator, then a
// conditional numerator, reduce), histogram/uniformity reporting, and the
// convergence sweep over the flattening model families.

#include "ratq/distribution.hpp"
#include "ratq/rng.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace ratq {

// Exact inverse-CDF draw for every denominator family (Poisson switches to
// transformed rejection above lambda = 30).
std::int64_t sample_denominator(const DenominatorModel& model, Rng& rng);

std::int64_t sample_numerator(const NumeratorModel& model, std::int64_t m, Rng& rng);

Rational draw(const RationalDistribution& dist, Rng& rng);

struct SampleConfig {
    RationalDistribution dist;
    std::int64_t sample_count = 1;
    std::uint64_t seed = 0;
    int bins = 20;
    int threads = 1;
};

struct UniformityReport {
    double ks_statistic = 0.0;             // sup |empirical CDF - x| against uniform
    std::vector<double> bin_frequencies;   // bin i covers ((i-1)/B, i/B]; bin 1 includes 0
    double max_atom_frequency = 0.0;       // largest single-value relative frequency
    double mu = 0.0;                       // the model's E[1/M]
};

// Draws sample_count rationals (worker t uses RNG substream t) and bins
// them; identical (seed, threads) configurations reproduce bit for bit.
UniformityReport histogram(const SampleConfig& config);

// The raw sample in draw order, chunked by worker.
std::vector<Rational> sample_many(const RationalDistribution& dist, std::int64_t count,
                                  std::uint64_t seed, int threads = 1);

// sup over jump points of |empirical CDF - ref|; values are sorted in place.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& ref_cdf);

struct SweepRow {
    std::int64_t k = 0;
    double mu = 0.0;
    double s_log_k = 0.0;
    std::vector<double> pmf_probes;
    std::vector<double> interval_probes;
    double cdf_sup_deviation = 0.0;  // sup over a grid of |F(x) - x|
};

std::vector<SweepRow> convergence_sweep(DenominatorModel::Kind family,
                                        const std::vector<std::int64_t>& k_values,
                                        const std::vector<Rational>& probe_rationals,
                                        const std::vector<std::pair<double, double>>& probe_intervals,
                                        int grid_points = 1001, double tolerance = 1e-12);

}  // namespace ratq
