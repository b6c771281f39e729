#pragma once

// Exact rationals on [0,1], stored as irreducible fractions. Construction
// reduces, so the representation is canonical: 0 and 1 are always 0/1 and
// 1/1, and two equal values compare equal field-by-field.

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ratq {

class Rational {
public:
    constexpr Rational() = default;  // 0/1

    Rational(std::int64_t numerator, std::int64_t denominator)
        : num_(numerator), den_(denominator) {
        if (den_ < 1)
            throw std::domain_error("Rational: denominator must be >= 1");
        if (num_ < 0 || num_ > den_)
            throw std::domain_error("Rational: numerator must lie in [0, denominator]");
        const std::int64_t g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    constexpr std::int64_t numerator() const { return num_; }
    constexpr std::int64_t denominator() const { return den_; }

    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    // Parses the exact "n/m" form used everywhere rationals cross a boundary.
    static Rational parse(std::string_view text);

    friend constexpr bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend constexpr bool operator<(const Rational& a, const Rational& b) {
        using wide = __int128;
        return static_cast<wide>(a.num_) * b.den_ < static_cast<wide>(b.num_) * a.den_;
    }
    friend constexpr bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend constexpr bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend constexpr bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // 1 - q, again an element of [0,1].
    Rational complement() const { return Rational(den_ - num_, den_); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational reduce(std::int64_t numerator, std::int64_t denominator) {
    return Rational(numerator, denominator);
}

inline Rational Rational::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size())
        throw std::invalid_argument("Rational: expected \"n/m\", got \"" + std::string(text) + "\"");
    const auto to_int = [&](std::string_view part) {
        std::int64_t out = 0;
        if (part.empty() || part.size() > 18)
            throw std::invalid_argument("Rational: bad integer in \"" + std::string(text) + "\"");
        for (char c : part) {
            if (c < '0' || c > '9')
                throw std::invalid_argument("Rational: bad integer in \"" + std::string(text) + "\"");
            out = out * 10 + (c - '0');
        }
        return out;
    };
    return Rational(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

}  // namespace ratq

template <>
struct std::hash<ratq::Rational> {
    std::size_t operator()(const ratq::Rational& q) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(q.numerator()) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(q.denominator()) + (h << 6) + (h >> 2);
        h ^= h >> 33;
        h *= 0xFF51AFD7ED558CCDull;
        h ^= h >> 33;
        return static_cast<std::size_t>(h);
    }
};
