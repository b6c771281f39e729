#pragma once

// The law of the random rational Q = N/M built from a denominator model and
// a conditional numerator model. Every infinite series is returned as a
// BoundedValue whose error_bound comes from the denominator's survival
// function: the remainder past a cut at L is at most P{M > L} because each
// conditional factor is at most 1.

#include "ratq/bounded_value.hpp"
#include "ratq/denominator_model.hpp"
#include "ratq/numerator_model.hpp"
#include "ratq/rational.hpp"

#include <cstdint>

namespace ratq {

struct NormalizationAudit {
    double partial_sum = 0.0;  // atom masses over rows 1..m_max, count-weighted
    double tail_bound = 0.0;   // P{M > m_max}, bounding everything left out
};

class RationalDistribution {
public:
    RationalDistribution(DenominatorModel denominator, NumeratorModel numerator,
                         double tolerance = 1e-12);

    const DenominatorModel& denominator_model() const { return den_; }
    const NumeratorModel& numerator_model() const { return num_; }
    double tolerance() const { return tol_; }

    // P{Q = q}: the series over all representations (l*n)/(l*m) of q.
    BoundedValue pmf(const Rational& q) const;

    // P{Q <= x}; 0 below 0, 1 from 1 on.
    BoundedValue cdf(double x) const;

    // P{a < Q <= b} via the floor-difference series, for 0 <= a < b <= 1.
    BoundedValue interval(double a, double b) const;

    BoundedValue mean() const;
    BoundedValue second_moment() const;
    BoundedValue variance() const;

    // E[e^{iuQ}].
    BoundedComplex charfn(double u) const;

    // Sums the full atom masses of rows 1..m_max (count-weighted when the
    // numerator law makes atoms of a row equal). partial_sum + tail_bound
    // must straddle 1 for any legitimate model pair.
    NormalizationAudit normalization_audit(std::int64_t m_max) const;

private:
    DenominatorModel den_;
    NumeratorModel num_;
    double tol_;
};

// P{Q = q} for geometric denominators and equiprobable numerators, through
// the closed form w(1-w)^{m-1}/(m+1) * 2F1(1, 1+1/m; 2+1/m; (1-w)^m).
double geometric_pmf_closed(double w, const Rational& q);

}  // namespace ratq
