#pragma once

// Conditional laws of the numerator N given a denominator M = m, supported
// on n = 0..m: equiprobable (each value has mass 1/(m+1)) or binomial.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace ratq {

class NumeratorModel {
public:
    enum class Kind { Equiprobable, Binomial };

    static NumeratorModel equiprobable();
    static NumeratorModel binomial(double p);  // requires 0 < p < 1

    Kind kind() const { return kind_; }
    double p() const { return p_; }

    // P{N = n | M = m}; 0 outside 0..m.
    double cond_pmf(std::int64_t n, std::int64_t m) const;

    // P{N <= x | M = m} with the jump at each integer included at the
    // boundary (step function, right-continuous). 0 for x < 0, 1 for x >= m.
    double cond_cdf_at(double x, std::int64_t m) const;

    double cond_mean(std::int64_t m) const;
    double cond_second_moment(std::int64_t m) const;

    // E[e^{iuN} | M = m]. Both families have stable closed forms: a
    // Dirichlet-kernel ratio for the equiprobable law, ((1-p) + p e^{iu})^m
    // for the binomial one.
    std::complex<double> cond_charfn(double u, std::int64_t m) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Equiprobable;
    double p_ = 0.0;
};

// Grammar: "equi" or "binom:p=0.3".
NumeratorModel parse_numerator_model(std::string_view spec);

}  // namespace ratq
