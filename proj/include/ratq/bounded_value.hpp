#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace ratq {

// A truncated series result: |true value - value| <= error_bound, with the
// bound derived analytically from the model's tail mass, never guessed.
struct BoundedValue {
    double value = 0.0;
    double error_bound = 0.0;
};

struct BoundedComplex {
    std::complex<double> value{0.0, 0.0};
    double error_bound = 0.0;
};

// Thrown when a series cannot reach the requested tolerance within the
// iteration cap. Carries the partial sum and the bound actually achieved,
// so callers see how far the evaluation got instead of a silent truncation.
class series_truncation_error : public std::runtime_error {
public:
    series_truncation_error(const std::string& what, BoundedValue best)
        : std::runtime_error(what), best_(best) {}

    const BoundedValue& best() const { return best_; }

private:
    BoundedValue best_;
};

}  // namespace ratq
