#include "ratq/numerator_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ratq {

namespace {

void require_row(std::int64_t m, const char* who) {
    if (m < 1) throw std::domain_error(std::string(who) + ": m must be >= 1");
}

double binomial_pmf(double p, std::int64_t n, std::int64_t m) {
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    const double log_choose =
        std::lgamma(dm + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dm - dn + 1.0);
    return std::exp(log_choose + dn * std::log(p) + (dm - dn) * std::log1p(-p));
}

// z^e for integer e by squaring; keeps |base| <= 1 powers exact-ish for huge m.
std::complex<double> pow_int(std::complex<double> z, std::int64_t e) {
    std::complex<double> acc{1.0, 0.0};
    while (e > 0) {
        if (e & 1) acc *= z;
        z *= z;
        e >>= 1;
    }
    return acc;
}

}  // namespace

NumeratorModel NumeratorModel::equiprobable() { return NumeratorModel{}; }

NumeratorModel NumeratorModel::binomial(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("Binomial: p must lie in (0,1)");
    NumeratorModel model;
    model.kind_ = Kind::Binomial;
    model.p_ = p;
    return model;
}

double NumeratorModel::cond_pmf(std::int64_t n, std::int64_t m) const {
    require_row(m, "cond_pmf");
    if (n < 0 || n > m) return 0.0;
    if (kind_ == Kind::Equiprobable) return 1.0 / static_cast<double>(m + 1);
    return binomial_pmf(p_, n, m);
}

double NumeratorModel::cond_cdf_at(double x, std::int64_t m) const {
    require_row(m, "cond_cdf_at");
    if (x < 0.0) return 0.0;
    if (x >= static_cast<double>(m)) return 1.0;
    const std::int64_t top = static_cast<std::int64_t>(std::floor(x));
    if (kind_ == Kind::Equiprobable)
        return static_cast<double>(top + 1) / static_cast<double>(m + 1);
    // Partial binomial sum over the smaller side of the split.
    if (top + 1 <= m - top) {
        double acc = 0.0;
        for (std::int64_t n = 0; n <= top; ++n) acc += binomial_pmf(p_, n, m);
        return std::min(acc, 1.0);
    }
    double acc = 0.0;
    for (std::int64_t n = top + 1; n <= m; ++n) acc += binomial_pmf(p_, n, m);
    return std::max(1.0 - acc, 0.0);
}

double NumeratorModel::cond_mean(std::int64_t m) const {
    require_row(m, "cond_mean");
    if (kind_ == Kind::Equiprobable) return static_cast<double>(m) / 2.0;
    return static_cast<double>(m) * p_;
}

double NumeratorModel::cond_second_moment(std::int64_t m) const {
    require_row(m, "cond_second_moment");
    const double dm = static_cast<double>(m);
    if (kind_ == Kind::Equiprobable) return dm * (2.0 * dm + 1.0) / 6.0;
    const double mean = dm * p_;
    return dm * p_ * (1.0 - p_) + mean * mean;
}

std::complex<double> NumeratorModel::cond_charfn(double u, std::int64_t m) const {
    require_row(m, "cond_charfn");
    if (kind_ == Kind::Binomial) {
        const std::complex<double> base{1.0 - p_ + p_ * std::cos(u), p_ * std::sin(u)};
        return pow_int(base, m);
    }
    // sum_{n=0..m} e^{iun} = e^{ium/2} sin((m+1)u/2) / sin(u/2), with u
    // reduced mod 2*pi first (the summands only see u mod 2*pi).
    const double d = std::remainder(u, 2.0 * std::numbers::pi);
    if (d == 0.0) return {1.0, 0.0};
    const double dm = static_cast<double>(m);
    const double ratio =
        std::sin(0.5 * (dm + 1.0) * d) / std::sin(0.5 * d) / (dm + 1.0);
    const double phase = 0.5 * dm * d;
    return {ratio * std::cos(phase), ratio * std::sin(phase)};
}

std::string NumeratorModel::describe() const {
    if (kind_ == Kind::Equiprobable) return "equi";
    char buf[48];
    std::snprintf(buf, sizeof buf, "binom:p=%.17g", p_);
    return buf;
}

NumeratorModel parse_numerator_model(std::string_view spec) {
    if (spec == "equi") return NumeratorModel::equiprobable();
    constexpr std::string_view prefix = "binom:p=";
    if (spec.substr(0, prefix.size()) == prefix && spec.size() > prefix.size()) {
        try {
            return NumeratorModel::binomial(std::stod(std::string(spec.substr(prefix.size()))));
        } catch (const std::domain_error&) {
            throw;
        } catch (...) {
            throw std::invalid_argument("numerator spec \"" + std::string(spec) + "\": bad p");
        }
    }
    throw std::invalid_argument("numerator spec \"" + std::string(spec) +
                                "\": expected \"equi\" or \"binom:p=...\"");
}

}  // namespace ratq
