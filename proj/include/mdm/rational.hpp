#pragma once
// rational.hpp - exact rational arithmetic on checked 64-bit integers.
//
// All prices, values, and utilities in this library are exact rationals;
// correctness proofs lean on strict comparisons that floating point would
// blur. Numerator/denominator are kept reduced with denominator > 0.
// Intermediate products run in __int128 and results are range-checked, so
// overflow surfaces as an InvariantError instead of silent wraparound.
// Inputs are desk-scale (values <= 10, a dozen items), which keeps reduced
// denominators far below the checked range in practice.

#include <cstdint>
#include <functional>
#include <numeric>
#include <string>

#include "mdm/errors.hpp"

namespace mdm {

class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit for literals
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (den_ == 0) throw ValidationError("rational with zero denominator");
        reduce();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_positive() const { return num_ > 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ValidationError("rational division by zero");
        return from_wide((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    // Exact comparison; cross-multiplication in __int128 cannot overflow for
    // in-range operands.
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    // Renders "n" for integers and "n/d" otherwise; parse() accepts both.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    static Rational parse(const std::string& text) {
        auto slash = text.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                std::int64_t n = std::stoll(text, &used);
                if (used != text.size()) throw ValidationError("trailing characters in rational: " + text);
                return Rational(n);
            }
            std::int64_t n = std::stoll(text.substr(0, slash), &used);
            if (used != slash) throw ValidationError("bad numerator in rational: " + text);
            std::int64_t d = std::stoll(text.substr(slash + 1), &used);
            if (used != text.size() - slash - 1) throw ValidationError("bad denominator in rational: " + text);
            return Rational(n, d);
        } catch (const std::invalid_argument&) {
            throw ValidationError("not a rational: " + text);
        } catch (const std::out_of_range&) {
            throw ValidationError("rational out of range: " + text);
        }
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

private:
    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw ValidationError("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd_wide(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        const __int128 lo = INT64_MIN, hi = INT64_MAX;
        if (n < lo || n > hi || d > hi)
            throw InvariantError("rational overflow: value exceeds 64-bit range after reduction");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    static __int128 gcd_wide(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void reduce() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;
};

// Least common multiple of two positive denominators, overflow-checked.
inline std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    std::int64_t g = std::gcd(a, b);
    __int128 l = (__int128)(a / g) * b;
    if (l > INT64_MAX) throw InvariantError("rational overflow: denominator lcm exceeds 64-bit range");
    return static_cast<std::int64_t>(l);
}

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace mdm

template <>
struct std::hash<mdm::Rational> {
    std::size_t operator()(const mdm::Rational& r) const noexcept {
        std::size_t h = std::hash<std::int64_t>()(r.num());
        return h * 1000003u ^ std::hash<std::int64_t>()(r.den());
    }
};
