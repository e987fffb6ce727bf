#pragma once

/**
 * @file core.hpp
 * @brief Shared plumbing: error types, checked 128-bit arithmetic, exact
 *        rationals, compensated summation and a counter-based RNG.
 */

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffscale {

using i128 = __int128;

/// Usage, configuration or domain error (CLI exit code 2).
class Error : public std::runtime_error {
   public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-convergence, under-resolution or overflow (CLI exit code 3).
class NumericalError : public Error {
   public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;
inline constexpr long double kLn2 = 0.693147180559945309417232121458176568L;

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw NumericalError("128-bit integer overflow in addition");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw NumericalError("128-bit integer overflow in subtraction");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw NumericalError("128-bit integer overflow in multiplication");
    return r;
}

inline i128 abs128(i128 a) { return a < 0 ? -a : a; }

inline i128 gcd128(i128 a, i128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    // the magnitude of INT128_MIN does not fit, but it never occurs after checked ops
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.insert(s.begin(), '-');
    return s;
}

/// Exact rational with 128-bit numerator and denominator, kept reduced.
class Rational {
   public:
    constexpr Rational() = default;
    Rational(i128 num, i128 den = 1) : num_(num), den_(den) {
        if (den_ == 0) throw Error("rational with zero denominator");
        normalise();
    }

    i128 num() const { return num_; }
    i128 den() const { return den_; }
    long double value() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }

    friend Rational operator+(const Rational& x, const Rational& y) {
        i128 g = gcd128(x.den_, y.den_);
        i128 lhs = checked_mul(x.num_, y.den_ / g);
        i128 rhs = checked_mul(y.num_, x.den_ / g);
        return {checked_add(lhs, rhs), checked_mul(x.den_ / g, y.den_)};
    }
    friend Rational operator-(const Rational& x) { return {-x.num_, x.den_}; }
    friend Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
    friend Rational operator*(const Rational& x, const Rational& y) {
        i128 g1 = gcd128(x.num_, y.den_);
        i128 g2 = gcd128(y.num_, x.den_);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        return {checked_mul(x.num_ / g1, y.num_ / g2), checked_mul(x.den_ / g2, y.den_ / g1)};
    }
    friend Rational operator/(const Rational& x, const Rational& y) {
        if (y.num_ == 0) throw Error("rational division by zero");
        return x * Rational(y.den_, y.num_);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
        i128 l = checked_mul(x.num_, y.den_);
        i128 r = checked_mul(y.num_, x.den_);
        return l <=> r;
    }

    std::string str() const {
        return den_ == 1 ? to_string(num_) : to_string(num_) + "/" + to_string(den_);
    }

   private:
    void normalise() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        i128 g = gcd128(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    i128 num_ = 0;
    i128 den_ = 1;
};

/// Neumaier (improved Kahan–Babuška) accumulator.
template <typename T = long double>
class CompensatedSum {
   public:
    void add(T x) {
        T t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(T x) {
        add(x);
        return *this;
    }
    T value() const { return sum_ + comp_; }

   private:
    T sum_ = 0;
    T comp_ = 0;
};

/// Sum terms in order of increasing magnitude with compensation; result is
/// independent of the input order.
template <typename T>
T ordered_sum(std::vector<T> terms) {
    std::sort(terms.begin(), terms.end(), [](T a, T b) {
        T fa = std::fabs(a), fb = std::fabs(b);
        return fa < fb || (fa == fb && a < b);
    });
    CompensatedSum<T> acc;
    for (T t : terms) acc.add(t);
    return acc.value();
}

/**
 * Counter-based generator: output i of stream (seed, stream) is a fixed hash of
 * (seed, stream, i). Streams are independent of call order elsewhere, so
 * parallel or reordered consumers reproduce the same numbers.
 */
class CounterRng {
   public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Exponential variate with unit mean, by inversion.
    double exponential() { return -std::log1p(-uniform()); }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t counter() const { return counter_; }

   private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// sin(x)/x with sinc(0) = 1.
template <typename T>
T sinc(T x) {
    if (std::fabs(x) < T(1e-8)) return T(1) - x * x / T(6);
    return std::sin(x) / x;
}

}  // namespace diffscale
