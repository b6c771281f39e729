#include "ratq/denominator_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ratq {

namespace {

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double harmonic(std::int64_t k) {
    Kahan acc;
    for (std::int64_t j = 1; j <= k; ++j) acc.add(1.0 / static_cast<double>(j));
    return acc.sum;
}

// lgamma(n+1) - [n ln n - n + ln sqrt(2 pi n)]; asymptotic series for large n.
double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                     s4 = 1.0 / 1188;
    if (n < 16.0)
        return std::lgamma(n + 1.0) -
               ((n + 0.5) * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi));
    const double nn = n * n;
    if (n > 500.0) return (s0 - s1 / nn) / n;
    if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x ln(x/np) + np - x without cancellation near x = np (deviance series).
double deviance_part(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        const double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double term = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1;; ++j) {
            term *= v2;
            const double next = s + term / (2.0 * j + 1.0);
            if (next == s) return next;
            s = next;
        }
    }
    return x * std::log(x / np) + np - x;
}

double poisson_pmf(double lambda, std::int64_t m) {
    // e^{-lambda} lambda^{m-1} / (m-1)!, full working precision even when
    // the naive exp(log) form would cancel O(lambda)-sized terms.
    const double n = static_cast<double>(m - 1);
    if (m == 1) return std::exp(-lambda);
    return std::exp(-stirling_error(n) - deviance_part(n, lambda)) /
           std::sqrt(2.0 * std::numbers::pi * n);
}

// P{M > L} for the shifted Poisson law. Summing the side with the smaller
// mass keeps tiny tails free of cancellation.
double poisson_survival(double lambda, std::int64_t L) {
    if (L <= 0) return 1.0;
    if (static_cast<double>(L) > lambda) {
        // Upper tail, terms decreasing after the mode.
        Kahan tail;
        std::int64_t m = L + 1;
        double term = poisson_pmf(lambda, m);
        while (term > tail.sum * 1e-18 + 1e-320) {
            tail.add(term);
            term *= lambda / static_cast<double>(m);
            ++m;
        }
        return std::min(1.0, tail.sum);
    }
    // L at or below the mean: complement of the (small) head mass. Terms
    // below lambda - 42*sqrt(lambda) are under e^{-800} and are skipped.
    const std::int64_t start = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(lambda - 42.0 * std::sqrt(lambda)) - 8);
    Kahan head;
    double term = poisson_pmf(lambda, start);
    for (std::int64_t m = start; m <= L; ++m) {
        head.add(term);
        term *= lambda / static_cast<double>(m);
    }
    return std::clamp(1.0 - head.sum, 0.0, 1.0);
}

[[noreturn]] void bad_spec(std::string_view spec, const char* why) {
    throw std::invalid_argument("model spec \"" + std::string(spec) + "\": " + why);
}

double parse_number(std::string_view spec, std::string_view text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(text), &used);
        if (used != text.size()) bad_spec(spec, "trailing characters after number");
        return v;
    } catch (const std::invalid_argument&) {
        bad_spec(spec, "expected a number");
    } catch (const std::out_of_range&) {
        bad_spec(spec, "number out of range");
    }
}

std::vector<double> load_custom_csv(std::string_view spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) bad_spec(spec, "cannot open custom pmf file");
    std::vector<double> table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string m_text, p_text;
        if (!std::getline(row, m_text, ',') || !std::getline(row, p_text))
            bad_spec(spec, "custom pmf rows must be \"m,p\"");
        if (!m_text.empty() && (m_text[0] < '0' || m_text[0] > '9')) continue;  // header
        const std::int64_t m = static_cast<std::int64_t>(parse_number(spec, m_text));
        if (m < 1) bad_spec(spec, "custom pmf support starts at m = 1");
        if (static_cast<std::size_t>(m) > table.size()) table.resize(static_cast<std::size_t>(m), 0.0);
        table[static_cast<std::size_t>(m - 1)] = parse_number(spec, p_text);
    }
    if (table.empty()) bad_spec(spec, "custom pmf file holds no rows");
    return table;
}

}  // namespace

DenominatorModel DenominatorModel::finite_equiprobable(std::int64_t k) {
    if (k < 1) throw std::domain_error("FiniteEquiprobable: k must be >= 1");
    DenominatorModel model;
    model.kind_ = Kind::FiniteEquiprobable;
    model.k_ = k;
    return model;
}

DenominatorModel DenominatorModel::geometric(double w) {
    if (!(w > 0.0) || !(w < 1.0)) throw std::domain_error("Geometric: w must lie in (0,1)");
    DenominatorModel model;
    model.kind_ = Kind::Geometric;
    model.w_ = w;
    return model;
}

DenominatorModel DenominatorModel::poisson(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("Poisson: lambda must be positive and finite");
    DenominatorModel model;
    model.kind_ = Kind::Poisson;
    model.lambda_ = lambda;
    return model;
}

DenominatorModel DenominatorModel::custom(std::vector<double> pmf_table) {
    if (pmf_table.empty()) throw std::domain_error("Custom: pmf table must be non-empty");
    Kahan total;
    for (double p : pmf_table) {
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::domain_error("Custom: pmf entries must be finite and >= 0");
        total.add(p);
    }
    if (std::fabs(total.sum - 1.0) > 1e-12)
        throw std::domain_error("Custom: pmf must sum to 1 within 1e-12");
    DenominatorModel model;
    model.kind_ = Kind::Custom;
    model.k_ = static_cast<std::int64_t>(pmf_table.size());
    model.table_ = std::move(pmf_table);
    // tail_[L] = P{M > L}, accumulated from the far end.
    model.tail_.assign(model.table_.size() + 1, 0.0);
    Kahan tail;
    for (std::size_t i = model.table_.size(); i-- > 0;) {
        tail.add(model.table_[i]);
        model.tail_[i] = tail.sum;
    }
    return model;
}

double DenominatorModel::pmf(std::int64_t m) const {
    if (m < 1) throw std::domain_error("DenominatorModel::pmf: m must be >= 1");
    switch (kind_) {
        case Kind::FiniteEquiprobable:
            return m <= k_ ? 1.0 / static_cast<double>(k_) : 0.0;
        case Kind::Geometric:
            return w_ * std::pow(1.0 - w_, static_cast<double>(m - 1));
        case Kind::Poisson:
            return poisson_pmf(lambda_, m);
        case Kind::Custom:
            return m <= k_ ? table_[static_cast<std::size_t>(m - 1)] : 0.0;
    }
    return 0.0;
}

double DenominatorModel::mean_inverse() const {
    switch (kind_) {
        case Kind::FiniteEquiprobable:
            return harmonic(k_) / static_cast<double>(k_);
        case Kind::Geometric:
            return -w_ * std::log(w_) / (1.0 - w_);
        case Kind::Poisson:
            return -std::expm1(-lambda_) / lambda_;
        case Kind::Custom: {
            Kahan acc;
            for (std::size_t i = 0; i < table_.size(); ++i)
                acc.add(table_[i] / static_cast<double>(i + 1));
            return acc.sum;
        }
    }
    return 0.0;
}

double DenominatorModel::sup_pmf() const {
    switch (kind_) {
        case Kind::FiniteEquiprobable:
            return 1.0 / static_cast<double>(k_);
        case Kind::Geometric:
            return w_;
        case Kind::Poisson:
            return poisson_pmf(lambda_, static_cast<std::int64_t>(std::floor(lambda_)) + 1);
        case Kind::Custom:
            return *std::max_element(table_.begin(), table_.end());
    }
    return 0.0;
}

double DenominatorModel::survival(std::int64_t L) const {
    if (L < 0) throw std::domain_error("DenominatorModel::survival: L must be >= 0");
    if (L == 0) return 1.0;
    switch (kind_) {
        case Kind::FiniteEquiprobable:
            return L >= k_ ? 0.0 : static_cast<double>(k_ - L) / static_cast<double>(k_);
        case Kind::Geometric:
            return std::pow(1.0 - w_, static_cast<double>(L));
        case Kind::Poisson:
            return poisson_survival(lambda_, L);
        case Kind::Custom:
            return L >= k_ ? 0.0 : tail_[static_cast<std::size_t>(L)];
    }
    return 0.0;
}

std::int64_t DenominatorModel::support_max() const {
    return (kind_ == Kind::FiniteEquiprobable || kind_ == Kind::Custom) ? k_ : -1;
}

std::string DenominatorModel::describe() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case Kind::FiniteEquiprobable:
            out << "equi:k=" << k_;
            break;
        case Kind::Geometric:
            out << "geom:w=" << w_;
            break;
        case Kind::Poisson:
            out << "poisson:lambda=" << lambda_;
            break;
        case Kind::Custom:
            out << "custom:";
            for (std::size_t i = 0; i < table_.size(); ++i)
                out << (i ? "," : "") << table_[i];
            break;
    }
    return out.str();
}

DenominatorModel parse_denominator_model(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view family = spec.substr(0, colon);
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

    const auto keyed = [&](std::string_view key) {
        if (rest.substr(0, key.size()) != key || rest.size() <= key.size() || rest[key.size()] != '=')
            bad_spec(spec, "expected key=value parameter");
        return rest.substr(key.size() + 1);
    };

    if (family == "equi") {
        const double k = parse_number(spec, keyed("k"));
        if (k != std::floor(k) || std::fabs(k) > 9e18) bad_spec(spec, "k must be an integer");
        return DenominatorModel::finite_equiprobable(static_cast<std::int64_t>(k));
    }
    if (family == "geom") return DenominatorModel::geometric(parse_number(spec, keyed("w")));
    if (family == "poisson") return DenominatorModel::poisson(parse_number(spec, keyed("lambda")));
    if (family == "custom") {
        if (rest.empty()) bad_spec(spec, "custom needs @file.csv or an inline pmf");
        if (rest[0] == '@') return DenominatorModel::custom(load_custom_csv(spec, std::string(rest.substr(1))));
        std::vector<double> table;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const auto field = rest.substr(pos, comma == std::string_view::npos ? rest.size() - pos : comma - pos);
            table.push_back(parse_number(spec, field));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return DenominatorModel::custom(std::move(table));
    }
    bad_spec(spec, "unknown family (expected equi, geom, poisson, custom)");
}

DenominatorModel flattening_model(DenominatorModel::Kind family, std::int64_t k) {
    if (k < 1) throw std::domain_error("flattening_model: k must be >= 1");
    switch (family) {
        case DenominatorModel::Kind::FiniteEquiprobable:
            return DenominatorModel::finite_equiprobable(k);
        case DenominatorModel::Kind::Geometric:
            // w_k = 1/k; the k = 1 boundary (w = 1) is the point mass at M = 1.
            return k == 1 ? DenominatorModel::finite_equiprobable(1)
                          : DenominatorModel::geometric(1.0 / static_cast<double>(k));
        case DenominatorModel::Kind::Poisson:
            // lambda_k = k^2, so the modal value decays like 1/k and the
            // statistic below vanishes well before k = 1e4.
            return DenominatorModel::poisson(static_cast<double>(k) * static_cast<double>(k));
        case DenominatorModel::Kind::Custom:
            break;
    }
    throw std::domain_error("flattening_model: family must be equi, geom, or poisson");
}

double flattening_statistic(DenominatorModel::Kind family, std::int64_t k) {
    return flattening_model(family, k).sup_pmf() * std::log(static_cast<double>(k));
}

}  // namespace ratq
