#include "ratq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace ratq {

namespace {

// Hormann's PTRS transformed rejection; exact Poisson variates for
// lambda >= 10 without walking the CDF.
std::int64_t poisson_ptrs(double lambda, Rng& rng) {
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

std::int64_t poisson_sequential(double lambda, Rng& rng) {
    const double u = rng.uniform01();
    double term = std::exp(-lambda);
    double cum = term;
    std::int64_t m = 1;
    const std::int64_t limit =
        static_cast<std::int64_t>(lambda + 40.0 * std::sqrt(lambda)) + 128;
    while (u > cum && m < limit) {
        term *= lambda / static_cast<double>(m);
        cum += term;
        ++m;
    }
    return m;
}

struct WorkerResult {
    std::vector<std::int64_t> bin_counts;
    std::unordered_map<Rational, std::int64_t> atom_counts;
    std::vector<double> values;
};

WorkerResult run_worker(const RationalDistribution& dist, std::int64_t count, std::uint64_t seed,
                        std::uint64_t stream, int bins, bool keep_values) {
    WorkerResult result;
    result.bin_counts.assign(static_cast<std::size_t>(bins), 0);
    if (keep_values) result.values.reserve(static_cast<std::size_t>(count));
    Rng rng(seed, stream);
    for (std::int64_t i = 0; i < count; ++i) {
        const Rational q = draw(dist, rng);
        // bin = ceil(q * bins), computed exactly in integers; 0 joins bin 1.
        std::int64_t bin = 1;
        if (q.numerator() > 0) {
            const std::int64_t scaled = q.numerator() * static_cast<std::int64_t>(bins);
            bin = (scaled + q.denominator() - 1) / q.denominator();
        }
        ++result.bin_counts[static_cast<std::size_t>(bin - 1)];
        ++result.atom_counts[q];
        if (keep_values) result.values.push_back(q.value());
    }
    return result;
}

}  // namespace

std::int64_t sample_denominator(const DenominatorModel& model, Rng& rng) {
    switch (model.kind()) {
        case DenominatorModel::Kind::FiniteEquiprobable:
            return 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(model.k())));
        case DenominatorModel::Kind::Geometric: {
            const double u = rng.uniform01();
            if (u == 0.0) return 1;
            const double m = std::floor(std::log1p(-u) / std::log1p(-model.w()));
            return 1 + static_cast<std::int64_t>(m);
        }
        case DenominatorModel::Kind::Poisson:
            return model.lambda() < 30.0 ? poisson_sequential(model.lambda(), rng)
                                         : 1 + poisson_ptrs(model.lambda(), rng);
        case DenominatorModel::Kind::Custom: {
            const double u = rng.uniform01();
            // survival(m) = P{M > m} decreases; the drawn value is the first
            // m whose CDF 1 - survival(m) exceeds u.
            double cum = 0.0;
            for (std::int64_t m = 1; m <= model.k(); ++m) {
                cum += model.pmf(m);
                if (u < cum) return m;
            }
            return model.k();
        }
    }
    throw std::logic_error("sample_denominator: unknown kind");
}

std::int64_t sample_numerator(const NumeratorModel& model, std::int64_t m, Rng& rng) {
    if (m < 1) throw std::domain_error("sample_numerator: m must be >= 1");
    if (model.kind() == NumeratorModel::Kind::Equiprobable)
        return static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m) + 1));
    std::binomial_distribution<std::int64_t> binom(m, model.p());
    return binom(rng);
}

Rational draw(const RationalDistribution& dist, Rng& rng) {
    const std::int64_t m = sample_denominator(dist.denominator_model(), rng);
    const std::int64_t n = sample_numerator(dist.numerator_model(), m, rng);
    return Rational(n, m);
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& ref_cdf) {
    if (values.empty()) throw std::domain_error("ks_statistic: empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double ref = ref_cdf(values[i]);
        sup = std::max(sup, std::fabs(static_cast<double>(j) / n - ref));
        sup = std::max(sup, std::fabs(ref - static_cast<double>(i) / n));
        i = j;
    }
    return sup;
}

UniformityReport histogram(const SampleConfig& config) {
    if (config.sample_count < 1) throw std::domain_error("histogram: sample_count must be >= 1");
    if (config.bins < 1) throw std::domain_error("histogram: bins must be >= 1");
    const int threads = std::max(1, config.threads);

    std::vector<WorkerResult> results(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const std::int64_t base = config.sample_count / threads;
    const std::int64_t extra = config.sample_count % threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t count = base + (t < extra ? 1 : 0);
        pool.emplace_back([&, t, count] {
            results[static_cast<std::size_t>(t)] =
                run_worker(config.dist, count, config.seed, static_cast<std::uint64_t>(t),
                           config.bins, true);
        });
    }
    for (auto& worker : pool) worker.join();

    std::vector<std::int64_t> bin_counts(static_cast<std::size_t>(config.bins), 0);
    std::unordered_map<Rational, std::int64_t> atoms;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(config.sample_count));
    for (auto& r : results) {
        for (std::size_t b = 0; b < bin_counts.size(); ++b) bin_counts[b] += r.bin_counts[b];
        for (const auto& [q, c] : r.atom_counts) atoms[q] += c;
        values.insert(values.end(), r.values.begin(), r.values.end());
    }

    UniformityReport report;
    const double n = static_cast<double>(config.sample_count);
    report.bin_frequencies.reserve(bin_counts.size());
    for (std::int64_t c : bin_counts) report.bin_frequencies.push_back(static_cast<double>(c) / n);
    std::int64_t max_atom = 0;
    for (const auto& [q, c] : atoms) max_atom = std::max(max_atom, c);
    report.max_atom_frequency = static_cast<double>(max_atom) / n;
    report.mu = config.dist.denominator_model().mean_inverse();
    report.ks_statistic = ks_statistic(std::move(values), [](double x) { return x; });
    return report;
}

std::vector<Rational> sample_many(const RationalDistribution& dist, std::int64_t count,
                                  std::uint64_t seed, int threads) {
    if (count < 1) throw std::domain_error("sample_many: count must be >= 1");
    threads = std::max(1, threads);
    std::vector<std::vector<Rational>> chunks(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    const std::int64_t base = count / threads;
    const std::int64_t extra = count % threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t n = base + (t < extra ? 1 : 0);
        pool.emplace_back([&, t, n] {
            Rng rng(seed, static_cast<std::uint64_t>(t));
            auto& chunk = chunks[static_cast<std::size_t>(t)];
            chunk.reserve(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) chunk.push_back(draw(dist, rng));
        });
    }
    for (auto& worker : pool) worker.join();
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(count));
    for (auto& chunk : chunks) out.insert(out.end(), chunk.begin(), chunk.end());
    return out;
}

std::vector<SweepRow> convergence_sweep(DenominatorModel::Kind family,
                                        const std::vector<std::int64_t>& k_values,
                                        const std::vector<Rational>& probe_rationals,
                                        const std::vector<std::pair<double, double>>& probe_intervals,
                                        int grid_points, double tolerance) {
    if (k_values.empty()) throw std::domain_error("convergence_sweep: k_values must be non-empty");
    if (grid_points < 2) throw std::domain_error("convergence_sweep: grid needs >= 2 points");
    std::vector<SweepRow> rows;
    rows.reserve(k_values.size());
    for (std::int64_t k : k_values) {
        const DenominatorModel model = flattening_model(family, k);
        const RationalDistribution dist(model, NumeratorModel::equiprobable(), tolerance);
        SweepRow row;
        row.k = k;
        row.mu = model.mean_inverse();
        row.s_log_k = model.sup_pmf() * std::log(static_cast<double>(k));
        for (const Rational& q : probe_rationals) row.pmf_probes.push_back(dist.pmf(q).value);
        for (const auto& [a, b] : probe_intervals)
            row.interval_probes.push_back(dist.interval(a, b).value);
        double sup = 0.0;
        for (int g = 0; g < grid_points; ++g) {
            const double x = static_cast<double>(g) / static_cast<double>(grid_points - 1);
            sup = std::max(sup, std::fabs(dist.cdf(x).value - x));
        }
        row.cdf_sup_deviation = sup;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ratq
