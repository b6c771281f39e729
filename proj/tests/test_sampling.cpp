#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratq/farey.hpp"
#include "ratq/sampling.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using ratq::DenominatorModel;
using ratq::NumeratorModel;
using ratq::Rational;
using ratq::RationalDistribution;
using ratq::Rng;
using ratq::SampleConfig;
using Kind = ratq::DenominatorModel::Kind;

namespace {

RationalDistribution equi_pair(std::int64_t k) {
    return RationalDistribution(DenominatorModel::finite_equiprobable(k),
                                NumeratorModel::equiprobable());
}

std::map<Rational, std::int64_t> tally(const std::vector<Rational>& sample) {
    std::map<Rational, std::int64_t> counts;
    for (const Rational& q : sample) ++counts[q];
    return counts;
}

}  // namespace

TEST_CASE("identical seeds reproduce the sample bit for bit") {
    const RationalDistribution dist(DenominatorModel::geometric(0.3),
                                    NumeratorModel::equiprobable());
    const auto first = ratq::sample_many(dist, 5000, 42);
    const auto second = ratq::sample_many(dist, 5000, 42);
    CHECK(first == second);
    const auto other_seed = ratq::sample_many(dist, 5000, 43);
    CHECK(first != other_seed);

    SampleConfig config{dist, 20000, 7, 20, 1};
    const auto a = ratq::histogram(config);
    const auto b = ratq::histogram(config);
    CHECK(a.bin_frequencies == b.bin_frequencies);
    CHECK(a.ks_statistic == b.ks_statistic);
    CHECK(a.max_atom_frequency == b.max_atom_frequency);
}

TEST_CASE("worker substreams are the documented ones") {
    const RationalDistribution dist = equi_pair(50);
    const auto threaded = ratq::sample_many(dist, 1001, 99, 4);
    // workers get ceil/floor shares in order, worker t drawing from substream t
    std::vector<Rational> expected;
    const std::int64_t shares[4] = {251, 250, 250, 250};
    for (int t = 0; t < 4; ++t) {
        Rng rng(99, static_cast<std::uint64_t>(t));
        for (std::int64_t i = 0; i < shares[t]; ++i) expected.push_back(ratq::draw(dist, rng));
    }
    CHECK(threaded == expected);
}

TEST_CASE("a one-row model only produces 0 and 1") {
    const RationalDistribution dist = equi_pair(1);
    Rng rng(1);
    bool saw_zero = false, saw_one = false;
    for (int i = 0; i < 2000; ++i) {
        const Rational q = ratq::draw(dist, rng);
        CHECK(q.denominator() == 1);
        saw_zero |= q.numerator() == 0;
        saw_one |= q.numerator() == 1;
    }
    CHECK(saw_zero);
    CHECK(saw_one);
}

TEST_CASE("draws are always reduced") {
    const RationalDistribution dists[] = {
        equi_pair(64),
        RationalDistribution(DenominatorModel::poisson(40.0), NumeratorModel::binomial(0.37)),
        RationalDistribution(DenominatorModel::custom({0.2, 0.3, 0.1, 0.4}),
                             NumeratorModel::equiprobable()),
    };
    Rng rng(3);
    for (const auto& dist : dists)
        for (int i = 0; i < 5000; ++i) {
            const Rational q = ratq::draw(dist, rng);
            CHECK(std::gcd(q.numerator(), q.denominator()) == 1);
            CHECK(q.denominator() >= 1);
        }
}

TEST_CASE("atom frequencies match the exact pmf (two-row model)") {
    const RationalDistribution dist = equi_pair(2);
    constexpr std::int64_t n = 1'000'000;
    const auto counts = tally(ratq::sample_many(dist, n, 20260808));
    // exact masses from the enumeration oracle
    const auto atoms = oracle::enumerate_equi_atoms(2);
    for (const auto& [q, mass] : atoms) {
        const double freq = static_cast<double>(counts.at(q)) / static_cast<double>(n);
        const double sigma = std::sqrt(mass * (1.0 - mass) / static_cast<double>(n));
        CHECK(std::fabs(freq - mass) <= 3.0 * sigma);
    }
}

TEST_CASE("empirical pmf tracks the exact pmf on a small model") {
    const RationalDistribution dist = equi_pair(4);
    constexpr std::int64_t n = 1'000'000;
    const auto counts = tally(ratq::sample_many(dist, n, 11));
    for (std::int64_t m = 1; m <= 4; ++m)
        for (const Rational& q : ratq::row(m)) {
            const double exact = dist.pmf(q).value;
            if (exact < 1e-4) continue;
            const double freq =
                static_cast<double>(counts.count(q) ? counts.at(q) : 0) / static_cast<double>(n);
            const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
            CHECK(std::fabs(freq - exact) <= 4.0 * sigma);
        }
}

TEST_CASE("denominator samplers hit their model frequencies") {
    struct Case {
        DenominatorModel model;
        std::int64_t check_up_to;
    };
    const Case cases[] = {
        {DenominatorModel::geometric(0.4), 12},
        {DenominatorModel::poisson(5.0), 14},    // sequential-search path
        {DenominatorModel::poisson(60.0), 90},   // transformed-rejection path
        {DenominatorModel::custom({0.1, 0.2, 0.3, 0.4}), 4},
    };
    constexpr std::int64_t n = 400'000;
    for (const auto& c : cases) {
        Rng rng(17);
        std::map<std::int64_t, std::int64_t> counts;
        for (std::int64_t i = 0; i < n; ++i) ++counts[ratq::sample_denominator(c.model, rng)];
        for (std::int64_t m = 1; m <= c.check_up_to; ++m) {
            const double exact = c.model.pmf(m);
            if (exact < 5e-4) continue;
            const double freq =
                static_cast<double>(counts.count(m) ? counts.at(m) : 0) / static_cast<double>(n);
            const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
            CHECK(std::fabs(freq - exact) <= 4.5 * sigma);
        }
    }
}

TEST_CASE("binomial numerator draws follow the conditional law") {
    const NumeratorModel model = NumeratorModel::binomial(0.3);
    constexpr std::int64_t m = 10, n = 200'000;
    Rng rng(23);
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t i = 0; i < n; ++i) ++counts[ratq::sample_numerator(model, m, rng)];
    for (std::int64_t value = 0; value <= m; ++value) {
        const double exact = model.cond_pmf(value, m);
        if (exact < 1e-3) continue;
        const double freq =
            static_cast<double>(counts.count(value) ? counts.at(value) : 0) / static_cast<double>(n);
        const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n));
        CHECK(std::fabs(freq - exact) <= 4.5 * sigma);
    }
}

TEST_CASE("histogram report basics") {
    const RationalDistribution dist = equi_pair(1000);
    SampleConfig config{dist, 1, 5, 20, 1};
    const auto single = ratq::histogram(config);
    CHECK(*std::max_element(single.bin_frequencies.begin(), single.bin_frequencies.end()) == 1.0);
    CHECK(single.max_atom_frequency == 1.0);

    config.sample_count = 50'000;
    const auto report = ratq::histogram(config);
    double total = 0.0;
    for (double f : report.bin_frequencies) total += f;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.mu == dist.denominator_model().mean_inverse());
    CHECK(report.ks_statistic < 0.02);

    CHECK_THROWS_AS(ratq::histogram(SampleConfig{dist, 0, 1, 20, 1}), std::domain_error);
    CHECK_THROWS_AS(ratq::histogram(SampleConfig{dist, 10, 1, 0, 1}), std::domain_error);
}

TEST_CASE("threaded histograms merge counts without losing mass") {
    const RationalDistribution dist = equi_pair(500);
    SampleConfig config{dist, 60'000, 31, 20, 4};
    const auto report = ratq::histogram(config);
    double total = 0.0;
    for (double f : report.bin_frequencies) total += f;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const auto again = ratq::histogram(config);
    CHECK(report.bin_frequencies == again.bin_frequencies);
    CHECK(report.ks_statistic == again.ks_statistic);
}

TEST_CASE("a lopsided model is visibly non-uniform") {
    const RationalDistribution dist(DenominatorModel::geometric(0.9),
                                    NumeratorModel::equiprobable());
    SampleConfig config{dist, 100'000, 13, 20, 1};
    CHECK(ratq::histogram(config).ks_statistic > 0.1);
}

TEST_CASE("ks statistic of step samples against a reference") {
    // hand-checkable: three values, uniform reference
    CHECK(ratq::ks_statistic({0.5}, [](double x) { return x; }) == 0.5);
    // two copies of 0.25 then 1.0: the largest gap is |2/3 - 0.25| = 5/12
    CHECK(ratq::ks_statistic({0.25, 0.25, 1.0}, [](double x) { return x; }) ==
          doctest::Approx(5.0 / 12.0).epsilon(1e-12));
    CHECK_THROWS_AS(ratq::ks_statistic({}, [](double x) { return x; }), std::domain_error);
}

TEST_CASE("ks distance to the model's own cdf obeys the dkw rate") {
    // small model: the exact cdf jumps only at the atoms of rows 1..8,
    // so the sup over those atoms is the full sup-distance
    const RationalDistribution dist = equi_pair(8);
    std::vector<Rational> atoms;
    for (std::int64_t m = 1; m <= 8; ++m)
        for (const Rational& q : ratq::row(m)) atoms.push_back(q);
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> exact_cdf;
    double cum = 0.0;
    for (const Rational& q : atoms) {
        cum += dist.pmf(q).value;
        exact_cdf.push_back(cum);
    }

    constexpr std::int64_t n = 100'000;
    const double threshold = 1.63 / std::sqrt(static_cast<double>(n));  // 1% level
    int passes = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto counts = tally(ratq::sample_many(dist, n, seed));
        double sup = 0.0;
        std::int64_t seen = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const double below = static_cast<double>(seen) / static_cast<double>(n);
            const double exact_below = i == 0 ? 0.0 : exact_cdf[i - 1];
            sup = std::max(sup, std::fabs(below - exact_below));
            seen += counts.count(atoms[i]) ? counts.at(atoms[i]) : 0;
            const double at = static_cast<double>(seen) / static_cast<double>(n);
            sup = std::max(sup, std::fabs(at - exact_cdf[i]));
        }
        if (sup <= threshold) ++passes;
    }
    CHECK(passes >= 19);  // the bound fails ~1% of the time by construction
}

TEST_CASE("largest atom frequency stays under the flattening bound") {
    const DenominatorModel model = DenominatorModel::finite_equiprobable(100);
    const RationalDistribution dist(model, NumeratorModel::equiprobable());
    constexpr std::int64_t n = 100'000;
    SampleConfig config{dist, n, 2026, 20, 1};
    const auto report = ratq::histogram(config);
    const double mu = model.mean_inverse();
    CHECK(report.max_atom_frequency <= mu + 4.0 * std::sqrt(mu / static_cast<double>(n)));
}

TEST_CASE("convergence sweep trends toward uniformity") {
    const std::vector<std::int64_t> ks = {10, 100, 1000};
    const std::vector<Rational> probes = {Rational(1, 2), Rational(1, 3)};
    const std::vector<std::pair<double, double>> intervals = {{0.25, 0.75}, {0.0, 1.0}};
    for (Kind family : {Kind::FiniteEquiprobable, Kind::Geometric, Kind::Poisson}) {
        const auto rows = ratq::convergence_sweep(family, ks, probes, intervals, 201);
        REQUIRE(rows.size() == 3);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            const double mu = r.mu;
            for (double p : r.pmf_probes) CHECK(p <= mu + 1e-12);
            CHECK(std::fabs(r.interval_probes[0] - 0.5) <= 1.5 * mu + 1e-12);
            CHECK(r.cdf_sup_deviation <= mu + 1e-12);
            if (i > 0) {
                CHECK(r.mu < rows[i - 1].mu);
                CHECK(r.cdf_sup_deviation <= rows[i - 1].cdf_sup_deviation + 1e-12);
                for (std::size_t j = 0; j < probes.size(); ++j)
                    CHECK(r.pmf_probes[j] < rows[i - 1].pmf_probes[j]);
            }
        }
        // the (0,1] probe is the complement of the atom at zero for every k
        for (const auto& r : rows) {
            const RationalDistribution dist(ratq::flattening_model(family, r.k),
                                            NumeratorModel::equiprobable());
            CHECK(std::fabs(r.interval_probes[1] - (1.0 - dist.pmf(Rational(0, 1)).value)) <=
                  2e-12);
        }
    }
    CHECK_THROWS_AS(ratq::convergence_sweep(Kind::FiniteEquiprobable, {}, probes, intervals),
                    std::domain_error);
}
