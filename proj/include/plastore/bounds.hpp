#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include "budget.hpp"
#include "errors.hpp"
#include "point_seq.hpp"

namespace plastore {

/// Exact natural number.
class BigCount {
public:
    BigCount() = default;
    explicit BigCount(uint64_t v) : v_(static_cast<unsigned long>(v)) {}
    explicit BigCount(mpz_class v) : v_(std::move(v)) {}

    static BigCount binomial(uint64_t m, uint64_t k) {
        if (k > m)
            return BigCount(0);
        mpz_class r;
        mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(k));
        return BigCount(std::move(r));
    }

    static BigCount power(uint64_t base, uint64_t exp) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
        return BigCount(std::move(r));
    }

    BigCount &operator*=(const BigCount &o) {
        v_ *= o.v_;
        return *this;
    }
    BigCount &operator*=(uint64_t o) {
        v_ *= static_cast<unsigned long>(o);
        return *this;
    }
    BigCount &operator+=(const BigCount &o) {
        v_ += o.v_;
        return *this;
    }
    friend BigCount operator*(BigCount a, const BigCount &b) { return a *= b; }

    friend bool operator==(const BigCount &a, const BigCount &b) { return a.v_ == b.v_; }
    friend bool operator<(const BigCount &a, const BigCount &b) { return a.v_ < b.v_; }
    friend bool operator<=(const BigCount &a, const BigCount &b) { return a.v_ <= b.v_; }

    [[nodiscard]] bool is_zero() const { return sgn(v_) == 0; }
    [[nodiscard]] std::string str() const { return v_.get_str(); }
    [[nodiscard]] const mpz_class &value() const noexcept { return v_; }

    /// log2 from the exact value: mantissa in [0.5, 1) times 2^exp. −∞ for zero.
    [[nodiscard]] double log2() const {
        if (is_zero())
            return -INFINITY;
        long exp = 0;
        const double mant = mpz_get_d_2exp(&exp, v_.get_mpz_t());
        return static_cast<double>(exp) + std::log2(mant);
    }

private:
    mpz_class v_;
};

/// log2 of the exact binomial coefficient.
inline double log2_binomial(uint64_t m, uint64_t k) {
    if (k > m)
        throw domain_error("binomial(" + std::to_string(m) + ", " + std::to_string(k) + ") needs k <= m");
    return BigCount::binomial(m, k).log2();
}

namespace detail {

inline void require(bool ok, const std::string &what) {
    if (!ok)
        throw domain_error(what);
}

inline void check_common(uint64_t ell, uint64_t epsilon) {
    require(ell >= 1, "ell must be at least 1");
    require(epsilon >= 1, "epsilon must be at least 1");
}

inline void check_c(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &y) {
    check_common(ell, epsilon);
    require(n >= 2 * ell, "compression counts need n >= 2*ell");
    require(y.size() == ell, "y must have ell entries");
    for (size_t i = 0; i < y.size(); ++i) {
        require(y[i] >= 1 && y[i] <= u, "y values must lie in [1, u]");
        require(i == 0 || y[i] >= y[i - 1], "y must be non-decreasing");
    }
}

/// Base domain of the indexing counts (no x vector).
inline void check_i_base(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n) {
    check_common(ell, epsilon);
    const uint64_t shift = ell * (2 * epsilon - 1);
    require(u >= shift + ell, "indexing counts need u >= ell*(2*epsilon-1) + ell");
    require(n >= shift + 1, "indexing counts need n >= ell*(2*epsilon-1) + 1");
}

inline void check_i(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &x) {
    check_i_base(ell, epsilon, u, n);
    require(x.size() == ell, "x must have ell entries");
    for (size_t i = 0; i < x.size(); ++i) {
        require(x[i] >= 1 && x[i] <= u, "x values must lie in [1, u]");
        require(i == 0 || x[i] >= x[i - 1] + 2 * epsilon, "x gaps must be at least 2*epsilon");
    }
}

} // namespace detail

/// Factor of the compression count that depends on y: choices of the
/// segment starts, of each y'_i in [y_i, y_{i+1}], and of β, γ around them.
inline BigCount count_c_given_y(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n,
                                const std::vector<uint64_t> &y) {
    detail::check_c(ell, epsilon, u, n, y);
    BigCount r = BigCount::binomial(n - ell - 1, ell - 1);
    for (size_t i = 0; i + 1 < y.size(); ++i)
        r *= y[i + 1] - y[i] + 1;
    r *= BigCount::power(2 * epsilon + 1, 2 * ell);
    return r;
}

/// |C(ℓ, ε, u, n, y)| as stated, including the binom(u+ℓ−1, ℓ) choice of y.
inline BigCount count_c(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &y) {
    BigCount r = count_c_given_y(ell, epsilon, u, n, y);
    r *= BigCount::binomial(u + ell - 1, ell);
    return r;
}

inline BigCount count_i_given_x(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n,
                                const std::vector<uint64_t> &x) {
    detail::check_i(ell, epsilon, u, n, x);
    const uint64_t shift = ell * (2 * epsilon - 1);
    BigCount r = BigCount::binomial(n - shift - 1, ell - 1);
    for (size_t i = 0; i + 1 < x.size(); ++i)
        r *= x[i + 1] - x[i] - 1;
    r *= BigCount::power(2 * epsilon + 1, 2 * ell);
    return r;
}

/// |I(ℓ, ε, u, n, x)| as stated, including the binom(u−ℓ(2ε−1), ℓ) choice of x.
inline BigCount count_i(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &x) {
    BigCount r = count_i_given_x(ell, epsilon, u, n, x);
    r *= BigCount::binomial(u - ell * (2 * epsilon - 1), ell);
    return r;
}

/// Indexing count with every x gap replaced by its minimum 2ε.
inline BigCount count_i_general(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n) {
    detail::check_i_base(ell, epsilon, u, n);
    const uint64_t shift = ell * (2 * epsilon - 1);
    BigCount r = BigCount::binomial(u - shift, ell);
    r *= BigCount::binomial(n - shift - 1, ell - 1);
    r *= BigCount::power(2 * epsilon - 1, ell - 1);
    r *= BigCount::power(2 * epsilon + 1, 2 * ell);
    return r;
}

inline double lower_bound_c(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &y) {
    detail::check_c(ell, epsilon, u, n, y);
    long double bits = log2_binomial(n - ell - 1, ell - 1);
    bits += log2_binomial(u + ell - 1, ell);
    for (size_t i = 0; i + 1 < y.size(); ++i)
        bits += std::log2(static_cast<long double>(y[i + 1] - y[i] + 1));
    bits += 2.0L * ell * std::log2(static_cast<long double>(2 * epsilon + 1));
    return static_cast<double>(bits);
}

inline double lower_bound_i(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, const std::vector<uint64_t> &x) {
    detail::check_i(ell, epsilon, u, n, x);
    const uint64_t shift = ell * (2 * epsilon - 1);
    // below this the class is empty and has no bit count
    detail::require(n >= shift + ell, "indexing lower bound needs n >= ell*(2*epsilon-1) + ell");
    long double bits = log2_binomial(u - shift, ell);
    bits += log2_binomial(n - shift - 1, ell - 1);
    for (size_t i = 0; i + 1 < x.size(); ++i)
        bits += std::log2(static_cast<long double>(x[i + 1] - x[i] - 1));
    bits += 2.0L * ell * std::log2(static_cast<long double>(2 * epsilon + 1));
    return static_cast<double>(bits);
}

enum class BaselineVariant : uint8_t { binary_search = 1, constant_time = 2 };

/// Space of the LA-vector's PLA with the vanishing terms dropped.
inline double baseline_la_bits(uint64_t ell, uint64_t epsilon, uint64_t u, uint64_t n, BaselineVariant v,
                               double c = 2.0) {
    const long double l = ell, lu = u, ln = n;
    const long double delta = 2 * std::log2(static_cast<long double>(2 * epsilon + 1));
    if (v == BaselineVariant::binary_search)
        return static_cast<double>(l * (2 * std::log2(lu / l) + std::log2(ln / l) + 6 + delta));
    return static_cast<double>(l * (2 * std::log2(lu / l) + 4 + delta) + log2_binomial(n, std::min(ell, n)) +
                               ln / std::pow(std::log2(ln), static_cast<long double>(c)));
}

/// Space of the first PGM-index layer with the vanishing terms dropped.
inline double baseline_pgm_bits(uint64_t ell, uint64_t /*epsilon*/, uint64_t u, uint64_t n, BaselineVariant v,
                                double c = 2.0) {
    const long double l = ell, lu = u, ln = n;
    const long double per = 1.92L + std::log2(ln * ln / l);
    if (v == BaselineVariant::binary_search)
        return static_cast<double>(l * (per + 2 * std::log2(lu)));
    return static_cast<double>(l * (per + std::log2(lu)) + log2_binomial(u, std::min(ell, u)) +
                               lu / std::pow(std::log2(lu), static_cast<long double>(c)));
}

/// Parameters of one stored PLA needed to evaluate its bound.
struct BoundParams {
    uint64_t ell = 0;
    uint64_t epsilon = 0;      // construction error
    uint64_t epsilon_eff = 0;  // verified error after rounding
    uint64_t u = 0;
    uint64_t n = 0;
    std::vector<uint64_t> firsts;  // y_1..y_ℓ (compression) or x_1..x_ℓ (indexing)
};

struct BoundReport {
    Setting setting = Setting::compression;
    BoundParams params;
    BitBudget budget;
    bool bound_defined = false;
    uint64_t bound_epsilon = 0;  // ε plugged into the lower bound
    double lower_bound_bits = NAN;
    double conditional_bound_bits = NAN;  // log2 of the y- (x-) conditional factor only
    double measured_bits = 0;             // budget.structure_bits()
    double redundancy_bits = NAN;
    double redundancy_per_segment = NAN;
    double allowance_bits = NAN;  // 3ℓ·log2 log2(u/ℓ) + 512
    double baseline_bits = NAN;   // LA (compression) or PGM (indexing), binary-search variant
    double baseline_const_bits = NAN;
    std::string note;
};

/// 3ℓ·log2 log2(u/ℓ) + 512, with the double logarithm clamped at zero.
inline double redundancy_allowance(uint64_t ell, uint64_t u) {
    const double r = static_cast<double>(u) / static_cast<double>(ell);
    const double ll = r > 2.0 ? std::log2(std::log2(r)) : 0.0;
    return 3.0 * static_cast<double>(ell) * ll + 512.0;
}

inline BoundReport redundancy_report(const BitBudget &budget, const BoundParams &p, Setting setting,
                                     double c = 2.0) {
    BoundReport r;
    r.setting = setting;
    r.params = p;
    r.budget = budget;
    r.measured_bits = static_cast<double>(budget.structure_bits());
    r.allowance_bits = redundancy_allowance(p.ell, p.u);
    const bool comp = setting == Setting::compression;
    // ε_eff is the error the container guarantees; the construction ε is a
    // fallback for PLAs whose gaps fall outside the ε_eff domain.
    for (uint64_t eps : {p.epsilon_eff, p.epsilon}) {
        try {
            r.lower_bound_bits = comp ? lower_bound_c(p.ell, eps, p.u, p.n, p.firsts)
                                      : lower_bound_i(p.ell, eps, p.u, p.n, p.firsts);
            r.conditional_bound_bits = comp ? count_c_given_y(p.ell, eps, p.u, p.n, p.firsts).log2()
                                            : count_i_given_x(p.ell, eps, p.u, p.n, p.firsts).log2();
            r.bound_epsilon = eps;
            r.bound_defined = true;
            if (eps != p.epsilon_eff)
                r.note = "bound evaluated with construction epsilon";
            break;
        } catch (const domain_error &e) {
            r.note = std::string("lower bound undefined: ") + e.what();
        }
    }
    if (r.bound_defined) {
        r.redundancy_bits = r.measured_bits - r.lower_bound_bits;
        r.redundancy_per_segment = r.redundancy_bits / static_cast<double>(p.ell);
    }
    const uint64_t eps = p.epsilon_eff;
    if (comp) {
        r.baseline_bits = baseline_la_bits(p.ell, eps, p.u, p.n, BaselineVariant::binary_search, c);
        r.baseline_const_bits = baseline_la_bits(p.ell, eps, p.u, p.n, BaselineVariant::constant_time, c);
    } else {
        r.baseline_bits = baseline_pgm_bits(p.ell, eps, p.u, p.n, BaselineVariant::binary_search, c);
        r.baseline_const_bits = baseline_pgm_bits(p.ell, eps, p.u, p.n, BaselineVariant::constant_time, c);
    }
    return r;
}

inline nlohmann::ordered_json to_json(const BoundReport &r) {
    const auto num = [](double v) {
        return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    };
    const auto &b = r.budget;
    return {
        {"setting", std::string(to_string(r.setting))},
        {"ell", r.params.ell},
        {"epsilon", r.params.epsilon},
        {"epsilon_eff", r.params.epsilon_eff},
        {"u", r.params.u},
        {"n", r.params.n},
        {"bits",
         {{"x", b.x},
          {"y", b.y},
          {"b", b.b},
          {"p", b.p},
          {"delta_beta", b.delta_beta},
          {"delta_gamma", b.delta_gamma},
          {"gamma_last", b.gamma_last},
          {"aux", b.aux},
          {"header", b.header},
          {"framing", b.framing},
          {"padding", b.padding},
          {"structure", b.structure_bits()},
          {"total", b.total_bits()}}},
        {"bound_defined", r.bound_defined},
        {"bound_epsilon", r.bound_epsilon},
        {"lower_bound_bits", num(r.lower_bound_bits)},
        {"conditional_bound_bits", num(r.conditional_bound_bits)},
        {"measured_bits", r.measured_bits},
        {"redundancy_bits", num(r.redundancy_bits)},
        {"redundancy_per_segment", num(r.redundancy_per_segment)},
        {"allowance_bits", num(r.allowance_bits)},
        {r.setting == Setting::compression ? "baseline_la_bits" : "baseline_pgm_bits", num(r.baseline_bits)},
        {r.setting == Setting::compression ? "baseline_la_const_bits" : "baseline_pgm_const_bits",
         num(r.baseline_const_bits)},
        {"note", r.note},
    };
}

/// One key=value pair per line, in the same order and names as the JSON form.
inline std::string to_text(const BoundReport &r) {
    std::ostringstream out;
    out.precision(10);
    const nlohmann::ordered_json j = to_json(r);
    for (const auto &[k, v] : j.items()) {
        if (v.is_object()) {
            for (const auto &[k2, v2] : v.items())
                out << k << '.' << k2 << '=' << v2.dump() << '\n';
        } else if (v.is_string()) {
            out << k << '=' << v.get<std::string>() << '\n';
        } else {
            out << k << '=' << v.dump() << '\n';
        }
    }
    return out.str();
}

} // namespace plastore
