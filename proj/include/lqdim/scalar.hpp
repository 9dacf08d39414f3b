#pragma once

/**
 * @file scalar.hpp
 * @brief Exact scalar field for contraction ratios, translations and atoms.
 *
 * A Scalar is one of
 *   - a rational number (GMP, always in lowest terms, positive denominator),
 *   - an element a + b*sqrt(d) of a real quadratic field, d square-free,
 *   - a binary64 float.
 *
 * Exact variants promote to their common field; any operation touching a
 * float demotes the result to a float. Quadratic elements with b = 0 are
 * stored as rationals, so equal values always share one representation.
 * Order comparisons between quadratic values are decided exactly by sign
 * rationalisation, never through a float.
 */

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include "lqdim/error.hpp"

namespace lqdim {

using BigInt = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) fail(ErrorKind::domain, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational make_rational(long num, long den = 1) {
    return make_rational(BigInt(num), BigInt(den));
}

inline bool is_square_free(long d) {
    if (d < 2) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

/// Spacing between |x| and the next representable double above it.
inline double ulp(double x) {
    x = std::fabs(x);
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    return std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
}

/// A real embedding with a rigorous absolute error bound.
struct FloatApprox {
    double value = 0.0;
    double error_bound = 0.0;
};

struct Quadratic {
    Rational a;
    Rational b;
    long d = 0;
};

class Scalar {
public:
    enum class Kind { rational, quadratic, floating };

    Scalar() : value_(Rational(0)) {}
    Scalar(const Rational& q) : value_(q) { std::get<Rational>(value_).canonicalize(); }
    Scalar(Rational&& q) : value_(std::move(q)) { std::get<Rational>(value_).canonicalize(); }
    template <std::integral I>
    Scalar(I n) : value_(Rational(static_cast<long>(n))) {}

    /// a + b*sqrt(d); collapses to a rational when b = 0.
    static Scalar quadratic(Rational a, Rational b, long d) {
        if (!is_square_free(d))
            fail(ErrorKind::domain, "quadratic field needs a square-free d >= 2, got " + std::to_string(d));
        return make_quadratic(std::move(a), std::move(b), d);
    }

    static Scalar floating(double x) {
        Scalar s;
        s.value_ = x;
        return s;
    }

    /// (sqrt(5) - 1)/2, root of x^2 + x - 1.
    static Scalar golden() { return quadratic(make_rational(-1, 2), make_rational(1, 2), 5); }

    Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
    bool is_exact() const noexcept { return kind() != Kind::floating; }
    bool is_rational() const noexcept { return kind() == Kind::rational; }

    const Rational& as_rational() const {
        if (!is_rational()) fail(ErrorKind::unsupported, "scalar " + to_string() + " is not rational");
        return std::get<Rational>(value_);
    }
    const Quadratic& as_quadratic() const { return std::get<Quadratic>(value_); }
    double as_double_variant() const { return std::get<double>(value_); }

    /// Field discriminant d for quadratic values, 0 otherwise.
    long field() const noexcept { return kind() == Kind::quadratic ? std::get<Quadratic>(value_).d : 0; }

    int sign() const {
        switch (kind()) {
        case Kind::rational: return sgn(std::get<Rational>(value_));
        case Kind::quadratic: return quadratic_sign(std::get<Quadratic>(value_));
        case Kind::floating: {
            double x = std::get<double>(value_);
            return (x > 0) - (x < 0);
        }
        }
        return 0;
    }
    bool is_zero() const { return sign() == 0; }

    FloatApprox to_float() const;
    double approx() const { return to_float().value; }

    std::string to_string() const;

    friend Scalar operator+(const Scalar& x, const Scalar& y) {
        if (!x.is_exact() || !y.is_exact()) return floating(x.approx() + y.approx());
        if (x.is_rational() && y.is_rational()) return Scalar(Rational(x.rat() + y.rat()));
        long d = common_field(x, y);
        auto [xa, xb] = x.parts();
        auto [ya, yb] = y.parts();
        return make_quadratic(xa + ya, xb + yb, d);
    }

    friend Scalar operator-(const Scalar& x) {
        switch (x.kind()) {
        case Kind::rational: return Scalar(Rational(-x.rat()));
        case Kind::quadratic: {
            const auto& q = x.as_quadratic();
            return make_quadratic(-q.a, -q.b, q.d);
        }
        case Kind::floating: return floating(-x.as_double_variant());
        }
        return x;
    }

    friend Scalar operator-(const Scalar& x, const Scalar& y) {
        if (x.is_rational() && y.is_rational()) return Scalar(Rational(x.rat() - y.rat()));
        return x + (-y);
    }

    friend Scalar operator*(const Scalar& x, const Scalar& y) {
        if (!x.is_exact() || !y.is_exact()) return floating(x.approx() * y.approx());
        if (x.is_rational() && y.is_rational()) return Scalar(Rational(x.rat() * y.rat()));
        long d = common_field(x, y);
        auto [xa, xb] = x.parts();
        auto [ya, yb] = y.parts();
        return make_quadratic(xa * ya + xb * yb * d, xa * yb + xb * ya, d);
    }

    Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
    Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }

    /// Three-way exact comparison (float operands compare as floats).
    friend int compare(const Scalar& x, const Scalar& y) {
        if (x.is_rational() && y.is_rational()) {
            int c = cmp(x.rat(), y.rat());
            return (c > 0) - (c < 0);
        }
        if (!x.is_exact() || !y.is_exact()) {
            double a = x.approx(), b = y.approx();
            return (a > b) - (a < b);
        }
        return (x - y).sign();
    }

    friend bool operator==(const Scalar& x, const Scalar& y) { return compare(x, y) == 0; }
    friend std::weak_ordering operator<=>(const Scalar& x, const Scalar& y) {
        int c = compare(x, y);
        return c < 0 ? std::weak_ordering::less : c > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent;
    }

private:
    static Scalar make_quadratic(Rational a, Rational b, long d) {
        if (b == 0) return Scalar(std::move(a));
        Scalar s;
        s.value_ = Quadratic{std::move(a), std::move(b), d};
        return s;
    }

    static int quadratic_sign(const Quadratic& q) {
        int sa = sgn(q.a), sb = sgn(q.b);
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        // opposite signs: compare a^2 with b^2 d
        Rational lhs = q.a * q.a;
        Rational rhs = q.b * q.b * q.d;
        return cmp(lhs, rhs) > 0 ? sa : sb;
    }

    static long common_field(const Scalar& x, const Scalar& y) {
        long dx = x.field(), dy = y.field();
        if (dx != 0 && dy != 0 && dx != dy)
            fail(ErrorKind::field_mismatch,
                 "operands live in Q(sqrt " + std::to_string(dx) + ") and Q(sqrt " + std::to_string(dy) + ")");
        return dx != 0 ? dx : dy;
    }

    const Rational& rat() const { return std::get<Rational>(value_); }

    std::pair<Rational, Rational> parts() const {
        if (is_rational()) return {rat(), Rational(0)};
        const auto& q = as_quadratic();
        return {q.a, q.b};
    }

    std::variant<Rational, Quadratic, double> value_;
};

namespace detail {

class MpfrValue {
public:
    explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

} // namespace detail

inline FloatApprox Scalar::to_float() const {
    switch (kind()) {
    case Kind::floating: return {as_double_variant(), 0.0};
    case Kind::rational: {
        detail::MpfrValue r(53);
        int inexact = mpfr_set_q(r.get(), rat().get_mpq_t(), MPFR_RNDN);
        double v = mpfr_get_d(r.get(), MPFR_RNDN);
        return {v, inexact == 0 ? 0.0 : ulp(v)};
    }
    case Kind::quadratic: {
        const auto& q = as_quadratic();
        detail::MpfrValue s(160), t(160);
        mpfr_sqrt_ui(s.get(), static_cast<unsigned long>(q.d), MPFR_RNDN);
        if (sgn(q.a) * sgn(q.b) >= 0) {
            mpfr_mul_q(s.get(), s.get(), q.b.get_mpq_t(), MPFR_RNDN);
            mpfr_add_q(s.get(), s.get(), q.a.get_mpq_t(), MPFR_RNDN);
        } else {
            // a + b sqrt d = (a^2 - b^2 d) / (a - b sqrt d); the denominator has no cancellation
            Rational neg_b = -q.b;
            Rational norm = q.a * q.a - q.b * q.b * q.d;
            mpfr_mul_q(s.get(), s.get(), neg_b.get_mpq_t(), MPFR_RNDN);
            mpfr_add_q(s.get(), s.get(), q.a.get_mpq_t(), MPFR_RNDN);
            mpfr_set_q(t.get(), norm.get_mpq_t(), MPFR_RNDN);
            mpfr_div(s.get(), t.get(), s.get(), MPFR_RNDN);
        }
        double v = mpfr_get_d(s.get(), MPFR_RNDN);
        return {v, ulp(v)};
    }
    }
    return {};
}

inline std::string Scalar::to_string() const {
    switch (kind()) {
    case Kind::rational: return rat().get_str();
    case Kind::quadratic: {
        const auto& q = as_quadratic();
        return q.a.get_str() + (sgn(q.b) < 0 ? "-" : "+") + Rational(abs(q.b)).get_str() + "*sqrt(" +
               std::to_string(q.d) + ")";
    }
    case Kind::floating: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", as_double_variant());
        return buf;
    }
    }
    return {};
}

/**
 * Byte string that identifies an exact value: equal keys iff equal values.
 * Floats have no canonical key; callers collapse them by bit equality.
 */
inline std::string canonical_key(const Scalar& x) {
    switch (x.kind()) {
    case Scalar::Kind::rational: {
        const Rational& q = x.as_rational();
        return "r" + q.get_num().get_str(16) + "/" + q.get_den().get_str(16);
    }
    case Scalar::Kind::quadratic: {
        const auto& q = x.as_quadratic();
        return "q" + std::to_string(q.d) + ":" + q.a.get_num().get_str(16) + "/" + q.a.get_den().get_str(16) + ":" +
               q.b.get_num().get_str(16) + "/" + q.b.get_den().get_str(16);
    }
    case Scalar::Kind::floating: break;
    }
    fail(ErrorKind::not_canonicalizable, "float scalar " + x.to_string() + " has no canonical key");
}

inline FloatApprox to_float(const Scalar& x) { return x.to_float(); }

inline Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }

inline Scalar pow(const Scalar& x, unsigned n) {
    Scalar result(1), base = x;
    while (n) {
        if (n & 1u) result *= base;
        n >>= 1u;
        if (n) base *= base;
    }
    return result;
}

/// Multiplicative inverse; defined for every nonzero exact value.
inline Scalar inverse(const Scalar& x) {
    if (x.is_zero()) fail(ErrorKind::domain, "inverse of zero");
    switch (x.kind()) {
    case Scalar::Kind::rational: return Scalar(Rational(1 / x.as_rational()));
    case Scalar::Kind::quadratic: {
        const auto& q = x.as_quadratic();
        Rational norm = q.a * q.a - q.b * q.b * q.d;
        return Scalar::quadratic(q.a / norm, -q.b / norm, q.d);
    }
    case Scalar::Kind::floating: return Scalar::floating(1.0 / x.as_double_variant());
    }
    return x;
}

/// Exact floor for rational and quadratic values.
inline BigInt floor(const Scalar& x) {
    switch (x.kind()) {
    case Scalar::Kind::rational: {
        const Rational& q = x.as_rational();
        BigInt r;
        mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
        return r;
    }
    case Scalar::Kind::quadratic: {
        BigInt k(std::floor(x.approx()));
        while (compare(x, Scalar(Rational(k))) < 0) --k;
        while (compare(x, Scalar(Rational(k + 1))) >= 0) ++k;
        return k;
    }
    case Scalar::Kind::floating: return BigInt(std::floor(x.as_double_variant()));
    }
    return {};
}

/// Multiply by 2^k exactly (k may be negative).
inline Scalar scale_pow2(const Scalar& x, int k) {
    if (!x.is_exact()) return Scalar::floating(std::ldexp(x.approx(), k));
    Rational f = k >= 0 ? Rational(BigInt(1) << k) : Rational(BigInt(1), BigInt(1) << (-k));
    return x * Scalar(f);
}

namespace detail {

inline std::string trim_lower(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace detail

inline Rational parse_rational(const std::string& text) {
    std::string s = detail::trim_lower(text);
    if (s.empty()) fail(ErrorKind::config, "empty rational");
    if (s.front() == '+') s.erase(0, 1);
    auto slash = s.find('/');
    auto digits_ok = [](const std::string& t) {
        std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
        if (i >= t.size()) return false;
        return std::all_of(t.begin() + static_cast<long>(i), t.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!digits_ok(num) || !digits_ok(den)) fail(ErrorKind::config, "cannot parse rational '" + text + "'");
    return make_rational(BigInt(num), BigInt(den));
}

/**
 * Parse a scalar literal:
 *   "2/3", "-5"          rational
 *   "golden"             (sqrt(5) - 1)/2
 *   "sqrt(2)", "sqrt2"   quadratic (square factors are pulled out)
 *   "0.75", "1e-3"       float
 */
inline Scalar parse_scalar(const std::string& text) {
    std::string s = detail::trim_lower(text);
    if (s == "golden") return Scalar::golden();
    bool negate = false;
    std::string body = s;
    if (!body.empty() && body[0] == '-' && body.rfind("-sqrt", 0) == 0) {
        negate = true;
        body.erase(0, 1);
    }
    if (body.rfind("sqrt", 0) == 0) {
        std::string arg = body.substr(4);
        if (!arg.empty() && arg.front() == '(' && arg.back() == ')') arg = arg.substr(1, arg.size() - 2);
        long n = 0;
        try {
            std::size_t used = 0;
            n = std::stol(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            fail(ErrorKind::config, "cannot parse '" + text + "'");
        }
        if (n < 0) fail(ErrorKind::config, "square root of a negative number in '" + text + "'");
        long k = 1, d = n;
        for (long p = 2; p * p <= d;) {
            if (d % (p * p) == 0) {
                d /= p * p;
                k *= p;
            } else {
                ++p;
            }
        }
        Scalar r = d <= 1 ? Scalar(Rational(k * d)) : Scalar::quadratic(Rational(0), Rational(k), d);
        return negate ? -r : r;
    }
    if (s.find_first_of(".e") != std::string::npos && s.find("sqrt") == std::string::npos) {
        try {
            std::size_t used = 0;
            double x = std::stod(s, &used);
            if (used == s.size()) return Scalar::floating(x);
        } catch (const std::exception&) {
        }
        fail(ErrorKind::config, "cannot parse float '" + text + "'");
    }
    return Scalar(parse_rational(s));
}

} // namespace lqdim
