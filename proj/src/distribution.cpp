#include "ratq/distribution.hpp"

#include "ratq/farey.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace ratq {

namespace {

constexpr std::uint64_t kIterationCap = 10'000'000;

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

template <class T>
struct Accum;

template <>
struct Accum<double> {
    Kahan k;
    void add(double x) { k.add(x); }
    double value() const { return k.sum; }
    static double scalar(double v) { return v; }
};

template <>
struct Accum<std::complex<double>> {
    Kahan re, im;
    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.sum, im.sum}; }
    static double scalar(std::complex<double> v) { return std::abs(v); }
};

[[noreturn]] void unreachable_tolerance(const char* op, double partial, double bound) {
    throw series_truncation_error(
        std::string(op) + ": tolerance unreachable within iteration cap (best bound " +
            std::to_string(bound) + ")",
        BoundedValue{partial, bound});
}

// Certified sum of den.pmf(m) * weight(m) over the multiples m of `step`,
// where |weight| <= 1. The returned bound covers everything not summed:
// finite supports are exhausted (bound 0); the geometric cut at L leaves at
// most (1-w)^L; the Poisson walk covers a window [A,B] around the mean,
// with the skipped head below A at most (A-1)*pmf(A-1) (terms increase up
// to the mode) and the tail past B dominated by a geometric series of
// ratio lambda/(B+1) < 1.
template <class T, class Weight>
std::pair<T, double> certified_sum(const DenominatorModel& den, std::int64_t step, double tol,
                                   Weight&& weight, const char* op) {
    Accum<T> acc;
    switch (den.kind()) {
        case DenominatorModel::Kind::FiniteEquiprobable:
        case DenominatorModel::Kind::Custom: {
            const std::int64_t top = den.support_max();
            for (std::int64_t m = step; m <= top; m += step) {
                const double p = den.pmf(m);
                if (p != 0.0) acc.add(p * weight(m));
            }
            return {acc.value(), 0.0};
        }
        case DenominatorModel::Kind::Geometric: {
            const double w = den.w();
            const double log_ratio = std::log1p(-w);
            const double needed = std::log(tol) / log_ratio;  // survival(L) <= tol at L = needed
            std::uint64_t terms =
                needed <= static_cast<double>(step)
                    ? 1
                    : static_cast<std::uint64_t>(std::ceil(needed / static_cast<double>(step)));
            const bool capped = terms > kIterationCap;
            if (capped) terms = kIterationCap;
            double p = w * std::pow(1.0 - w, static_cast<double>(step - 1));
            const double ratio = std::pow(1.0 - w, static_cast<double>(step));
            for (std::uint64_t t = 1; t <= terms; ++t) {
                const std::int64_t m = static_cast<std::int64_t>(t) * step;
                if ((t & 1023u) == 0)  // refresh against multiplicative drift
                    p = w * std::pow(1.0 - w, static_cast<double>(m - 1));
                acc.add(p * weight(m));
                p *= ratio;
            }
            const double bound =
                std::pow(1.0 - w, static_cast<double>(terms) * static_cast<double>(step));
            if (capped) unreachable_tolerance(op, Accum<T>::scalar(acc.value()), bound);
            return {acc.value(), bound};
        }
        case DenominatorModel::Kind::Poisson: {
            const double lam = den.lambda();
            const double spread = std::sqrt(lam);
            double z = 12.0;
            std::int64_t lo = 1, hi = 1;
            double head = 0.0, tail = 0.0;
            for (;;) {
                lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(lam - z * spread) - 8);
                hi = std::max<std::int64_t>(static_cast<std::int64_t>(lam) + 8,
                                            static_cast<std::int64_t>(lam + z * spread) + 8);
                head = lo > 1 ? std::min(1.0, static_cast<double>(lo - 1) * den.pmf(lo - 1)) : 0.0;
                const double r = lam / static_cast<double>(hi + 1);
                tail = den.pmf(hi + 1) / (1.0 - r);
                if (head + tail <= 0.5 * tol) break;
                if (z > 1e7) unreachable_tolerance(op, 0.0, head + tail);
                z *= 1.6;
            }
            if (static_cast<std::uint64_t>(hi - lo + 1) > kIterationCap)
                unreachable_tolerance(op, 0.0, 1.0);
            const std::int64_t first = ((lo + step - 1) / step) * step;
            double p = den.pmf(lo);
            for (std::int64_t m = lo; m <= hi; ++m) {
                if (m != lo && (m - lo) % 1024 == 0) p = den.pmf(m);
                if (m >= first && m % step == 0) acc.add(p * weight(m));
                p *= lam / static_cast<double>(m);
            }
            return {acc.value(), head + tail};
        }
    }
    return {acc.value(), 0.0};
}

}  // namespace

RationalDistribution::RationalDistribution(DenominatorModel denominator, NumeratorModel numerator,
                                           double tolerance)
    : den_(std::move(denominator)), num_(numerator), tol_(tolerance) {
    if (!(tol_ > 0.0)) throw std::domain_error("RationalDistribution: tolerance must be > 0");
}

BoundedValue RationalDistribution::pmf(const Rational& q) const {
    const std::int64_t n = q.numerator();
    const std::int64_t m = q.denominator();
    auto [value, bound] = certified_sum<double>(
        den_, m, tol_,
        [&](std::int64_t rep_den) { return num_.cond_pmf((rep_den / m) * n, rep_den); }, "pmf");
    return {value, bound};
}

BoundedValue RationalDistribution::cdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf: x must not be NaN");
    if (x < 0.0) return {0.0, 0.0};
    if (x >= 1.0) return {1.0, 0.0};
    auto [value, bound] = certified_sum<double>(
        den_, 1, tol_,
        [&](std::int64_t m) { return num_.cond_cdf_at(static_cast<double>(m) * x, m); }, "cdf");
    return {value, bound};
}

BoundedValue RationalDistribution::interval(double a, double b) const {
    if (!(a >= 0.0) || !(a < b) || !(b <= 1.0))
        throw std::domain_error("interval: need 0 <= a < b <= 1");
    auto [value, bound] = certified_sum<double>(
        den_, 1, tol_,
        [&](std::int64_t m) {
            const double dm = static_cast<double>(m);
            return num_.cond_cdf_at(dm * b, m) - num_.cond_cdf_at(dm * a, m);
        },
        "interval");
    return {value, bound};
}

BoundedValue RationalDistribution::mean() const {
    if (num_.kind() == NumeratorModel::Kind::Equiprobable) return {0.5, 0.0};
    auto [value, bound] = certified_sum<double>(
        den_, 1, tol_,
        [&](std::int64_t m) { return num_.cond_mean(m) / static_cast<double>(m); }, "mean");
    return {value, bound};
}

BoundedValue RationalDistribution::second_moment() const {
    if (num_.kind() == NumeratorModel::Kind::Equiprobable)
        return {1.0 / 3.0 + den_.mean_inverse() / 6.0, 0.0};
    auto [value, bound] = certified_sum<double>(
        den_, 1, tol_,
        [&](std::int64_t m) {
            const double dm = static_cast<double>(m);
            return num_.cond_second_moment(m) / (dm * dm);
        },
        "second_moment");
    return {value, bound};
}

BoundedValue RationalDistribution::variance() const {
    if (num_.kind() == NumeratorModel::Kind::Equiprobable)
        return {1.0 / 12.0 + den_.mean_inverse() / 6.0, 0.0};
    const BoundedValue m1 = mean();
    const BoundedValue m2 = second_moment();
    const double bound =
        m2.error_bound + 2.0 * std::fabs(m1.value) * m1.error_bound + m1.error_bound * m1.error_bound;
    return {m2.value - m1.value * m1.value, bound};
}

BoundedComplex RationalDistribution::charfn(double u) const {
    auto [value, bound] = certified_sum<std::complex<double>>(
        den_, 1, tol_,
        [&](std::int64_t m) { return num_.cond_charfn(u / static_cast<double>(m), m); }, "charfn");
    return {value, bound};
}

NormalizationAudit RationalDistribution::normalization_audit(std::int64_t m_max) const {
    if (m_max < 1) throw std::domain_error("normalization_audit: m_max must be >= 1");
    const std::vector<std::int64_t> counts = row_counts_by_recurrence(m_max);
    Kahan partial;
    const bool atoms_equal = num_.kind() == NumeratorModel::Kind::Equiprobable;
    for (std::int64_t m = 1; m <= m_max; ++m) {
        if (atoms_equal) {
            // Every atom of row m carries the same mass; one evaluation covers
            // the whole row.
            const Rational representative = m == 1 ? Rational(0, 1) : Rational(1, m);
            partial.add(static_cast<double>(counts[static_cast<std::size_t>(m - 1)]) *
                        pmf(representative).value);
        } else {
            for (const Rational& q : row(m)) partial.add(pmf(q).value);
        }
    }
    return {partial.sum, den_.survival(m_max)};
}

double geometric_pmf_closed(double w, const Rational& q) {
    if (!(w > 0.0) || !(w < 1.0))
        throw std::domain_error("geometric_pmf_closed: w must lie in (0,1)");
    const std::int64_t m = q.denominator();
    const double dm = static_cast<double>(m);
    const double z = std::pow(1.0 - w, dm);
    const double b = 1.0 + 1.0 / dm;
    // 2F1(1, b; b+1; z) = sum_j b/(b+j) z^j; the term ratio is
    // z*(b+j)/(b+j+1) < z, so the remainder past J is below z^{J+1}/(1-z).
    Kahan series;
    double zpow = 1.0;
    std::uint64_t j = 0;
    for (;;) {
        series.add(b / (b + static_cast<double>(j)) * zpow);
        zpow *= z;
        ++j;
        if (zpow / (1.0 - z) <= 1e-16 * series.sum) break;
        if (j >= kIterationCap)
            unreachable_tolerance("geometric_pmf_closed", series.sum, zpow / (1.0 - z));
    }
    return w * std::pow(1.0 - w, dm - 1.0) / (dm + 1.0) * series.sum;
}

}  // namespace ratq
