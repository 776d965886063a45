#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spectral_torsion {

using Rational = mpq_class;

struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-9;
};

template <class R>
struct RealTraits;

template <>
struct RealTraits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational ratio(long p, long q) {
        Rational r{mpz_class(p), mpz_class(q)};
        r.canonicalize();
        return r;
    }
    static double to_double(const Rational& x) { return x.get_d(); }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static bool near(const Rational& a, const Rational& b, Tolerance = {}) { return a == b; }
    static std::string format(const Rational& x) { return x.get_str(); }
};

template <>
struct RealTraits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }
    static double to_double(double x) { return x; }
    static bool is_zero(double x) { return x == 0.0; }
    static bool near(double a, double b, Tolerance tol = {}) {
        double scale = std::max(std::fabs(a), std::fabs(b));
        return std::fabs(a - b) <= std::max(tol.abs, tol.rel * scale);
    }
    static std::string format(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
};

template <class R>
concept RealScalar = requires { RealTraits<R>::exact; };

// Complex number with real and imaginary parts in R. With R = Rational this is
// the Gaussian rationals, so products of gamma matrices stay exact.
template <RealScalar R>
struct Gaussian {
    R re{};
    R im{};

    Gaussian() = default;
    Gaussian(R r) : re(std::move(r)), im(RealTraits<R>::zero()) {}
    Gaussian(R r, R i) : re(std::move(r)), im(std::move(i)) {}
    Gaussian(int r) : re(r), im(0) {}

    static Gaussian i() { return {RealTraits<R>::zero(), RealTraits<R>::one()}; }

    Gaussian conj() const { return {re, R(-im)}; }
    R norm2() const { return R(re * re + im * im); }
    bool is_zero() const { return RealTraits<R>::is_zero(re) && RealTraits<R>::is_zero(im); }
    bool is_real() const { return RealTraits<R>::is_zero(im); }

    Gaussian& operator+=(const Gaussian& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Gaussian& operator-=(const Gaussian& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Gaussian& operator*=(const Gaussian& o) {
        R r = re * o.re - im * o.im;
        R s = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(s);
        return *this;
    }
    Gaussian& operator*=(const R& s) {
        re *= s;
        im *= s;
        return *this;
    }
    Gaussian& operator/=(const Gaussian& o) {
        R d = o.norm2();
        if (RealTraits<R>::is_zero(d)) throw std::domain_error("division by zero");
        R r = (re * o.re + im * o.im) / d;
        R s = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(s);
        return *this;
    }

    friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
    friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
    friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
    friend Gaussian operator*(Gaussian a, const R& s) { return a *= s; }
    friend Gaussian operator*(const R& s, Gaussian a) { return a *= s; }
    friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
    friend Gaussian operator-(const Gaussian& a) { return {R(-a.re), R(-a.im)}; }
    friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re == b.re && a.im == b.im; }

    friend std::ostream& operator<<(std::ostream& os, const Gaussian& z) {
        return os << RealTraits<R>::format(z.re) << (z.im < 0 ? "" : "+") << RealTraits<R>::format(z.im) << "i";
    }
};

using GaussianRational = Gaussian<Rational>;
using ComplexDouble = Gaussian<double>;

template <class S>
struct ScalarTraits;

template <RealScalar R>
struct ScalarTraits<R> : RealTraits<R> {
    using real_type = R;
    static constexpr bool complex = false;
};

template <RealScalar R>
struct ScalarTraits<Gaussian<R>> {
    using real_type = R;
    static constexpr bool exact = RealTraits<R>::exact;
    static constexpr bool complex = true;
    static Gaussian<R> zero() { return Gaussian<R>(RealTraits<R>::zero()); }
    static Gaussian<R> one() { return Gaussian<R>(RealTraits<R>::one()); }
    static Gaussian<R> ratio(long p, long q) { return Gaussian<R>(RealTraits<R>::ratio(p, q)); }
    static bool is_zero(const Gaussian<R>& z) { return z.is_zero(); }
    static bool near(const Gaussian<R>& a, const Gaussian<R>& b, Tolerance tol = {}) {
        return RealTraits<R>::near(a.re, b.re, tol) && RealTraits<R>::near(a.im, b.im, tol);
    }
};

template <class S>
concept Scalar = requires { ScalarTraits<S>::exact; };

template <Scalar S>
S ratio(long p, long q) {
    return ScalarTraits<S>::ratio(p, q);
}

template <Scalar S>
bool near(const S& a, const S& b, Tolerance tol = {}) {
    return ScalarTraits<S>::near(a, b, tol);
}

template <RealScalar R>
double to_double(const R& x) {
    return RealTraits<R>::to_double(x);
}

// Parses "p/q", integers, and decimals with optional exponent ("-1.25e-3")
// into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    std::string s(text);
    if (s.empty()) throw fail();
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational r;
        try {
            mpz_class p(s.substr(0, slash), 10);
            mpz_class q(s.substr(slash + 1), 10);
            if (q == 0) throw fail();
            r = Rational(p, q);
        } catch (const std::invalid_argument&) {
            throw fail();
        }
        r.canonicalize();
        return r;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_point = false;
    for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
        char c = s[pos];
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            if (seen_point) --scale;
        } else {
            throw fail();
        }
    }
    if (digits.empty()) throw fail();
    if (pos < s.size()) {
        std::string exp = s.substr(pos + 1);
        if (exp.empty()) throw fail();
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(exp, &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != exp.size() || std::labs(e) > 4000) throw fail();
        scale += e;
    }
    mpz_class num(digits, 10);
    if (negative) num = -num;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
    Rational r = scale >= 0 ? Rational(num * pow10) : Rational(num, pow10);
    r.canonicalize();
    return r;
}

template <RealScalar R>
R parse_real(std::string_view text) {
    if constexpr (RealTraits<R>::exact) {
        return parse_rational(text);
    } else {
        return parse_rational(text).get_d();
    }
}

}  // namespace spectral_torsion
