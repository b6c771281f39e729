#include "ratq/farey.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ratq {

namespace {

void require_positive(std::int64_t m, const char* who) {
    if (m < 1) throw std::domain_error(std::string(who) + ": argument must be >= 1");
}

}  // namespace

namespace {

template <class UInt>
inline bool coprime(UInt a, UInt b) {
    while (b != 0) {
        const UInt r = a % b;
        a = b;
        b = r;
    }
    return a == 1;
}

// gcd test per candidate over the lower half row: gcd(m-n, m) = gcd(n, m)
// pairs the halves for m >= 3, and n = m/2 is never coprime. Candidates
// sharing the factor 2 or 3 with m are stepped over instead of tested.
template <class UInt>
std::int64_t half_row_coprime_count(UInt m) {
    const UInt half = (m - 1) / 2;
    const bool skip2 = m % 2 == 0, skip3 = m % 3 == 0;
    std::int64_t count = 0;
    if (skip2 && skip3) {
        for (UInt n = 1; n <= half;) {
            if (coprime(m, n)) ++count;
            n += 4;  // n = 1, 5, 7, 11, ... (mod 12 pattern halved: 1, 5 mod 6)
            if (n > half) break;
            if (coprime(m, n)) ++count;
            n += 2;
        }
    } else if (skip2) {
        for (UInt n = 1; n <= half; n += 2)
            if (coprime(m, n)) ++count;
    } else if (skip3) {
        for (UInt n = 1; n <= half;) {
            if (coprime(m, n)) ++count;
            n += 1;  // n = 1, 2, 4, 5, 7, 8, ...
            if (n > half) break;
            if (coprime(m, n)) ++count;
            n += 2;
        }
    } else {
        for (UInt n = 1; n <= half; ++n)
            if (coprime(m, n)) ++count;
    }
    return 2 * count;
}

}  // namespace

std::int64_t row_count_by_gcd(std::int64_t m) {
    require_positive(m, "row_count_by_gcd");
    if (m == 1) return 2;
    if (m == 2) return 1;
    if (static_cast<std::uint64_t>(m) <= 0xFFFFFFFFull)
        return half_row_coprime_count<std::uint32_t>(static_cast<std::uint32_t>(m));
    return half_row_coprime_count<std::uint64_t>(static_cast<std::uint64_t>(m));
}

std::vector<std::int64_t> row_counts_by_recurrence(std::int64_t m_max) {
    require_positive(m_max, "row_counts_by_recurrence");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(m_max));
    // divisor_sum[n-1] accumulates sum of counts over proper divisors of n.
    std::vector<std::int64_t> divisor_sum(static_cast<std::size_t>(m_max), 0);
    for (std::int64_t n = 1; n <= m_max; ++n) {
        const std::int64_t c = (n + 1) - divisor_sum[static_cast<std::size_t>(n - 1)];
        counts[static_cast<std::size_t>(n - 1)] = c;
        for (std::int64_t j = 2 * n; j <= m_max; j += n)
            divisor_sum[static_cast<std::size_t>(j - 1)] += c;
    }
    return counts;
}

Fraction row_sum(std::int64_t m) {
    require_positive(m, "row_sum");
    const std::int64_t c = row_count_by_gcd(m);
    if (c % 2 == 0) return Fraction{c / 2, 1};
    return Fraction{c, 2};  // only m = 2, where the single entry is 1/2
}

std::vector<Rational> row(std::int64_t m) {
    require_positive(m, "row");
    std::vector<Rational> out;
    if (m == 1) {
        out.push_back(Rational(0, 1));
        out.push_back(Rational(1, 1));
        return out;
    }
    for (std::int64_t n = 1; n < m; ++n)
        if (std::gcd(n, m) == 1) out.push_back(Rational(n, m));
    return out;
}

FareyTable FareyTable::up_to(std::int64_t max_denominator) {
    require_positive(max_denominator, "FareyTable::up_to");
    FareyTable table;
    table.counts_ = row_counts_by_recurrence(max_denominator);
    table.prefix_.resize(table.counts_.size());
    std::int64_t running = 0;
    for (std::size_t i = 0; i < table.counts_.size(); ++i) {
        running += table.counts_[i];
        table.prefix_[i] = running;
    }
    return table;
}

std::int64_t FareyTable::row_count(std::int64_t m) const {
    if (m < 1 || m > max_denominator())
        throw std::out_of_range("FareyTable::row_count: row not covered");
    return counts_[static_cast<std::size_t>(m - 1)];
}

Fraction FareyTable::row_sum(std::int64_t m) const {
    const std::int64_t c = row_count(m);
    if (c % 2 == 0) return Fraction{c / 2, 1};
    return Fraction{c, 2};
}

std::int64_t FareyTable::prefix(std::int64_t m) const {
    if (m < 0 || m > max_denominator())
        throw std::out_of_range("FareyTable::prefix: row not covered");
    return m == 0 ? 0 : prefix_[static_cast<std::size_t>(m - 1)];
}

std::int64_t FareyTable::index_of(const Rational& q) const {
    const std::int64_t m = q.denominator();
    if (m > max_denominator())
        throw std::out_of_range("FareyTable::index_of: denominator not covered; grow the table");
    const std::int64_t base = prefix(m - 1);
    if (m == 1) return base + (q.numerator() == 0 ? 1 : 2);
    std::int64_t rank = 0;
    for (std::int64_t n = 1; n <= q.numerator(); ++n)
        if (std::gcd(n, m) == 1) ++rank;
    return base + rank;
}

Rational FareyTable::at_index(std::int64_t k) const {
    if (k < 1 || k > size())
        throw std::out_of_range("FareyTable::at_index: index not covered; grow the table");
    // First row whose prefix reaches k.
    const auto it = std::lower_bound(prefix_.begin(), prefix_.end(), k);
    const std::int64_t m = static_cast<std::int64_t>(it - prefix_.begin()) + 1;
    std::int64_t offset = k - prefix(m - 1);  // 1-based rank within the row
    if (m == 1) return offset == 1 ? Rational(0, 1) : Rational(1, 1);
    for (std::int64_t n = 1; n < m; ++n) {
        if (std::gcd(n, m) == 1 && --offset == 0) return Rational(n, m);
    }
    throw std::logic_error("FareyTable::at_index: prefix sums inconsistent");
}

FareyTable FareyTable::grown_to_index(std::int64_t k) const {
    if (k < 1) throw std::domain_error("FareyTable::grown_to_index: index must be >= 1");
    if (k <= size()) return *this;
    // Rows 1..M hold roughly (3/pi^2) M^2 entries; start from that estimate.
    std::int64_t m = std::max<std::int64_t>(
        {max_denominator() * 2, 64,
         static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(k) * 3.3)))});
    FareyTable grown = up_to(m);
    while (grown.size() < k) grown = up_to(m *= 2);
    return grown;
}

void FareyTable::write_csv(std::ostream& os) const {
    os << "m,nu,sigma_num,sigma_den\n";
    for (std::int64_t m = 1; m <= max_denominator(); ++m) {
        const Fraction s = row_sum(m);
        os << m << ',' << row_count(m) << ',' << s.num << ',' << s.den << '\n';
    }
}

Rational at_index(std::int64_t k) {
    return FareyTable::up_to(1).grown_to_index(k).at_index(k);
}

std::int64_t index_of(const Rational& q) {
    return FareyTable::up_to(q.denominator()).index_of(q);
}

}  // namespace ratq
