#pragma once

// Marginal laws of the denominator M on {1, 2, ...}. Four families:
//
//   FiniteEquiprobable(k)   p(m) = 1/k for m <= k
//   Geometric(w)            p(m) = w (1-w)^{m-1}
//   Poisson(lambda)         p(m) = e^{-lambda} lambda^{m-1} / (m-1)!
//   Custom                  explicit finite table
//
// The Poisson support is shifted so denominators start at 1. Each family
// carries a closed-form E[1/M], the supremum of its probabilities, and an
// exact survival function P{M > L} used to certify series truncation.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ratq {

class DenominatorModel {
public:
    enum class Kind { FiniteEquiprobable, Geometric, Poisson, Custom };

    static DenominatorModel finite_equiprobable(std::int64_t k);
    static DenominatorModel geometric(double w);       // requires 0 < w < 1
    static DenominatorModel poisson(double lambda);    // requires lambda > 0
    // pmf_table[i] = P{M = i+1}; entries must be >= 0 and sum to 1 (1e-12).
    static DenominatorModel custom(std::vector<double> pmf_table);

    Kind kind() const { return kind_; }
    std::int64_t k() const { return k_; }
    double w() const { return w_; }
    double lambda() const { return lambda_; }

    double pmf(std::int64_t m) const;

    // mu = E[1/M], in closed form per family:
    //   FiniteEquiprobable: H_k / k      Geometric: -w ln w / (1-w)
    //   Poisson: (1 - e^{-lambda}) / lambda      Custom: finite sum
    double mean_inverse() const;

    // sup_m p(m). For Poisson this is the exact modal value at m = floor(lambda)+1.
    double sup_pmf() const;

    // P{M > L}, exact per family. Non-increasing in L, -> 0.
    double survival(std::int64_t L) const;

    // Largest support point for the finite families, -1 when unbounded.
    std::int64_t support_max() const;

    // Round-trips through parse_denominator_model (custom prints inline).
    std::string describe() const;

private:
    DenominatorModel() = default;

    Kind kind_ = Kind::FiniteEquiprobable;
    std::int64_t k_ = 1;
    double w_ = 0.0;
    double lambda_ = 0.0;
    std::vector<double> table_;  // custom pmf, index m-1
    std::vector<double> tail_;   // custom survival, tail_[L] = P{M > L}
};

// Grammar: "equi:k=1000", "geom:w=0.1", "poisson:lambda=50",
// "custom:@file.csv" (CSV columns m,p), or "custom:p1,p2,..." inline.
DenominatorModel parse_denominator_model(std::string_view spec);

// The k-th model of the flattening sequences: FiniteEquiprobable(k),
// Geometric(1/k) (k = 1 degenerates to FiniteEquiprobable(1)), Poisson(k^2).
DenominatorModel flattening_model(DenominatorModel::Kind family, std::int64_t k);

// s_k * ln k for the k-th model of the family; the vanishing of this
// statistic is what makes interval probabilities tend to interval length.
double flattening_statistic(DenominatorModel::Kind family, std::int64_t k);

}  // namespace ratq
