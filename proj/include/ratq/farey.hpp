#pragma once

// Repetition-free enumeration of the rationals in [0,1], organized as a
// triangular table: row m holds the irreducible fractions with denominator m
// (row 1 holds 0/1 and 1/1). Row counts are computed two independent ways —
// by gcd counting and by the divisor-sum recurrence
//
//     sum_{d | n} count(d) = n + 1,
//
// solved progressively as count(n) = (n+1) - sum_{d|n, d<n} count(d).
// Prefix sums of the counts give a global index over the table read row by
// row, entries by increasing numerator.

#include "ratq/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ratq {

// Number of table entries in row m: 2 for m = 1, otherwise the count of
// n in 1..m-1 coprime to m. Brute-force route, one row at a time.
std::int64_t row_count_by_gcd(std::int64_t m);

// Counts for all rows 1..m_max at once via the recurrence (sieve style).
std::vector<std::int64_t> row_counts_by_recurrence(std::int64_t m_max);

// Exact fraction, used for row sums (which may exceed 1).
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Exact sum of the entries of row m; always equals row_count(m)/2.
Fraction row_sum(std::int64_t m);

// The entries of row m in increasing order.
std::vector<Rational> row(std::int64_t m);

class FareyTable {
public:
    static FareyTable up_to(std::int64_t max_denominator);

    std::int64_t max_denominator() const { return static_cast<std::int64_t>(counts_.size()); }
    std::int64_t size() const { return prefix_.empty() ? 0 : prefix_.back(); }

    std::int64_t row_count(std::int64_t m) const;
    Fraction row_sum(std::int64_t m) const;
    // Entries in rows 1..m, i.e. the global index of the last entry of row m.
    std::int64_t prefix(std::int64_t m) const;

    // Global 1-based index of q in row-major order; q's row must be covered.
    std::int64_t index_of(const Rational& q) const;
    // Inverse of index_of; requires 1 <= k <= size().
    Rational at_index(std::int64_t k) const;

    // A table covering global index k (returns *this when already covered).
    // Growth doubles the denominator range, so repeated calls are amortized.
    FareyTable grown_to_index(std::int64_t k) const;

    // Columns: m,nu,sigma_num,sigma_den
    void write_csv(std::ostream& os) const;

private:
    std::vector<std::int64_t> counts_;  // counts_[m-1]
    std::vector<std::int64_t> prefix_;  // prefix_[m-1]
};

// Stateless conveniences; each call builds a covering table.
Rational at_index(std::int64_t k);
std::int64_t index_of(const Rational& q);

}  // namespace ratq
