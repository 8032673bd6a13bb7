#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bcsalg {

/// Exact rational number with 64-bit numerator/denominator, always stored in
/// lowest terms with a positive denominator. All the algebra elements in this
/// library have dyadic coefficients with small exponents, so 64 bits is ample;
/// intermediates go through 128-bit and overflow throws instead of wrapping.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) {
            throw std::domain_error("rational: zero denominator");
        }
        if (d < 0) {
            n = -n;
            d = -d;
        }
        std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        num_ = n;
        den_ = d;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational &a, const Rational &b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return reduce128(n, d);
    }
    friend Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }
    friend Rational operator*(const Rational &a, const Rational &b) {
        __int128 n = (__int128)a.num_ * b.num_;
        __int128 d = (__int128)a.den_ * b.den_;
        return reduce128(n, d);
    }
    friend Rational operator/(const Rational &a, const Rational &b) {
        if (b.num_ == 0) {
            throw std::domain_error("rational: division by zero");
        }
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        return reduce128(n, d);
    }

    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }
    Rational &operator/=(const Rational &o) { return *this = *this / o; }

    friend bool operator==(const Rational &a, const Rational &b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational &a, const Rational &b) { return !(a == b); }
    friend bool operator<(const Rational &a, const Rational &b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }

    double to_double() const { return (double)num_ / (double)den_; }

    std::string str() const {
        if (den_ == 1) {
            return std::to_string(num_);
        }
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::ostream &operator<<(std::ostream &os, const Rational &r) {
        return os << r.str();
    }

  private:
    static Rational reduce128(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        const __int128 max64 = INT64_MAX;
        if (n > max64 || n < -max64 || d > max64) {
            throw std::overflow_error("rational: value exceeds 64-bit range");
        }
        Rational r;
        r.num_ = (std::int64_t)n;
        r.den_ = (std::int64_t)d;
        return r;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    std::int64_t num_;
    std::int64_t den_;
};

} // namespace bcsalg
