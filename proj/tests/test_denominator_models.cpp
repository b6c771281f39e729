#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratq/denominator_model.hpp"
#include "ratq/rng.hpp"
#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

using ratq::DenominatorModel;
using Kind = ratq::DenominatorModel::Kind;

namespace {

// Direct series for E[1/M], summed far past any mass the test models carry.
double mean_inverse_series(const DenominatorModel& model, std::int64_t top) {
    double sum = 0.0, carry = 0.0;
    for (std::int64_t m = 1; m <= top; ++m) {
        const double y = model.pmf(m) / static_cast<double>(m) - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

TEST_CASE("pmf closed forms") {
    CHECK(DenominatorModel::geometric(0.5).pmf(3) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(DenominatorModel::finite_equiprobable(4).pmf(5) == 0.0);
    CHECK(DenominatorModel::poisson(2.0).pmf(1) ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(DenominatorModel::finite_equiprobable(4).pmf(2) == 0.25);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(DenominatorModel::geometric(0.0), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::geometric(1.0), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::poisson(0.0), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::poisson(-2.0), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::finite_equiprobable(0), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::custom({0.5, 0.4}), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::custom({0.5, -0.5, 1.0}), std::domain_error);
    CHECK_THROWS_AS(DenominatorModel::geometric(0.5).pmf(0), std::domain_error);
}

TEST_CASE("pmf sums to one") {
    const DenominatorModel models[] = {
        DenominatorModel::finite_equiprobable(123),
        DenominatorModel::geometric(0.37),
        DenominatorModel::poisson(9.5),
        DenominatorModel::custom({0.25, 0.5, 0.125, 0.125}),
    };
    for (const auto& model : models) {
        double total = 0.0;
        for (std::int64_t m = 1; m <= 4000; ++m) total += model.pmf(m);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mean_inverse closed forms") {
    CHECK(DenominatorModel::finite_equiprobable(1).mean_inverse() == 1.0);
    CHECK(DenominatorModel::geometric(0.5).mean_inverse() ==
          doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(DenominatorModel::poisson(1.0).mean_inverse() ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(DenominatorModel::custom({0.5, 0.5}).mean_inverse() ==
          doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("mean_inverse agrees with the direct series across random draws") {
    ratq::Rng rng(20260808);
    for (int trial = 0; trial < 50; ++trial) {
        const std::int64_t k = 1 + static_cast<std::int64_t>(rng.below(2000));
        const double w = 0.02 + 0.96 * rng.uniform01();
        const double lambda = 0.1 + 40.0 * rng.uniform01();

        const DenominatorModel equi = DenominatorModel::finite_equiprobable(k);
        CHECK(equi.mean_inverse() ==
              doctest::Approx(mean_inverse_series(equi, k)).epsilon(1e-12));

        const DenominatorModel geo = DenominatorModel::geometric(w);
        CHECK(geo.mean_inverse() ==
              doctest::Approx(mean_inverse_series(geo, 4000)).epsilon(1e-12));

        const DenominatorModel poi = DenominatorModel::poisson(lambda);
        CHECK(poi.mean_inverse() ==
              doctest::Approx(mean_inverse_series(poi, 1000)).epsilon(1e-12));
    }
}

TEST_CASE("mean_inverse below one unless the mass sits at m=1") {
    CHECK(DenominatorModel::finite_equiprobable(2).mean_inverse() < 1.0);
    CHECK(DenominatorModel::geometric(0.999).mean_inverse() < 1.0);
    CHECK(DenominatorModel::poisson(0.01).mean_inverse() < 1.0);
    CHECK(DenominatorModel::custom({0.999, 0.001}).mean_inverse() < 1.0);
}

TEST_CASE("sup_pmf") {
    CHECK(DenominatorModel::geometric(0.1).sup_pmf() == 0.1);
    CHECK(DenominatorModel::finite_equiprobable(1000).sup_pmf() == 0.001);
    CHECK(DenominatorModel::custom({0.25, 0.5, 0.25}).sup_pmf() == 0.5);

    // Poisson: exact modal value, close to the 1/sqrt(2 pi lambda) shape
    const DenominatorModel poi = DenominatorModel::poisson(100.0);
    const double exact = poi.pmf(101);
    CHECK(poi.sup_pmf() == exact);
    CHECK(poi.sup_pmf() ==
          doctest::Approx(1.0 / std::sqrt(200.0 * std::numbers::pi)).epsilon(0.01));
    for (std::int64_t m = 80; m <= 125; ++m) CHECK(poi.pmf(m) <= poi.sup_pmf());
}

TEST_CASE("survival tails") {
    CHECK(DenominatorModel::geometric(0.5).survival(10) ==
          doctest::Approx(std::pow(2.0, -10.0)).epsilon(1e-15));
    CHECK(DenominatorModel::finite_equiprobable(5).survival(5) == 0.0);
    CHECK(DenominatorModel::finite_equiprobable(5).survival(2) == doctest::Approx(0.6));
    CHECK(DenominatorModel::finite_equiprobable(7).survival(0) == 1.0);

    const DenominatorModel poi = DenominatorModel::poisson(3.0);
    CHECK(poi.survival(20) ==
          doctest::Approx(oracle::poisson_survival_direct(3.0, 20)).epsilon(1e-10));
    CHECK(poi.survival(2) ==
          doctest::Approx(oracle::poisson_survival_direct(3.0, 2)).epsilon(1e-12));

    // far tails of a large-mean model stay meaningful
    const DenominatorModel big = DenominatorModel::poisson(5e5);
    CHECK(big.survival(100) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(big.survival(6e5) ==
          doctest::Approx(oracle::poisson_survival_direct(5e5, 600000)).epsilon(1e-8));

    const DenominatorModel table = DenominatorModel::custom({0.25, 0.5, 0.125, 0.125});
    CHECK(table.survival(1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(table.survival(3) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(table.survival(4) == 0.0);
}

TEST_CASE("survival is non-increasing") {
    const DenominatorModel models[] = {
        DenominatorModel::geometric(0.2),
        DenominatorModel::poisson(12.0),
        DenominatorModel::finite_equiprobable(40),
        DenominatorModel::custom({0.1, 0.2, 0.3, 0.4}),
    };
    for (const auto& model : models) {
        double previous = 1.0;
        for (std::int64_t L = 1; L <= 120; ++L) {
            const double s = model.survival(L);
            CHECK(s <= previous + 1e-15);
            previous = s;
        }
        CHECK(previous <= 1e-4);
    }
}

TEST_CASE("flattening sequences") {
    const DenominatorModel equi100 = ratq::flattening_model(Kind::FiniteEquiprobable, 100);
    CHECK(equi100.kind() == Kind::FiniteEquiprobable);
    CHECK(ratq::flattening_statistic(Kind::FiniteEquiprobable, 100) ==
          doctest::Approx(std::log(100.0) / 100.0).epsilon(1e-12));

    // the geometric boundary k=1 degenerates to the point mass at M=1
    const DenominatorModel geo1 = ratq::flattening_model(Kind::Geometric, 1);
    CHECK(geo1.kind() == Kind::FiniteEquiprobable);
    CHECK(geo1.k() == 1);
    CHECK(ratq::flattening_model(Kind::Geometric, 50).w() == doctest::Approx(0.02));

    // statistics: strictly decreasing along each family and < 0.01 at k=1e4
    for (Kind family : {Kind::FiniteEquiprobable, Kind::Geometric, Kind::Poisson}) {
        double prev_mu = 2.0, prev_stat = 1e9;
        for (std::int64_t k : {10, 100, 1000, 10000}) {
            const double mu = ratq::flattening_model(family, k).mean_inverse();
            const double stat = ratq::flattening_statistic(family, k);
            CHECK(mu < prev_mu);
            CHECK(stat < prev_stat);
            prev_mu = mu;
            prev_stat = stat;
        }
        CHECK(prev_stat < 0.01);
        CHECK(prev_mu < 0.002);
    }
    CHECK_THROWS_AS(ratq::flattening_model(Kind::Custom, 5), std::domain_error);
}

TEST_CASE("spec strings parse and round-trip") {
    CHECK(ratq::parse_denominator_model("equi:k=1000").k() == 1000);
    CHECK(ratq::parse_denominator_model("geom:w=0.1").w() == doctest::Approx(0.1));
    CHECK(ratq::parse_denominator_model("poisson:lambda=50").lambda() == doctest::Approx(50.0));
    const DenominatorModel inline_custom = ratq::parse_denominator_model("custom:0.25,0.5,0.25");
    CHECK(inline_custom.kind() == Kind::Custom);
    CHECK(inline_custom.pmf(2) == 0.5);

    for (const char* spec : {"equi:k=17", "geom:w=0.25", "poisson:lambda=3.5"}) {
        const DenominatorModel model = ratq::parse_denominator_model(spec);
        CHECK(ratq::parse_denominator_model(model.describe()).describe() == model.describe());
    }

    CHECK_THROWS_AS(ratq::parse_denominator_model("equi"), std::invalid_argument);
    CHECK_THROWS_AS(ratq::parse_denominator_model("equi:k=0"), std::domain_error);
    CHECK_THROWS_AS(ratq::parse_denominator_model("geom:q=0.5"), std::invalid_argument);
    CHECK_THROWS_AS(ratq::parse_denominator_model("weird:x=1"), std::invalid_argument);
    CHECK_THROWS_AS(ratq::parse_denominator_model("custom:@/no/such/file.csv"),
                    std::invalid_argument);
}

TEST_CASE("custom models load from csv files") {
    const char* path = "ratq_test_custom.csv";
    {
        std::ofstream out(path);
        out << "m,p\n1,0.5\n2,0.25\n4,0.25\n";
    }
    const DenominatorModel model = ratq::parse_denominator_model(std::string("custom:@") + path);
    CHECK(model.pmf(1) == 0.5);
    CHECK(model.pmf(3) == 0.0);
    CHECK(model.pmf(4) == 0.25);
    CHECK(model.survival(2) == doctest::Approx(0.25).epsilon(1e-15));
    std::remove(path);
}
