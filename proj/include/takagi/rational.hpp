#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace takagi {

using Integer = mpz_class;

/// Exact rational number in canonical form: gcd(|num|, den) == 1 and den >= 1.
///
/// Every arithmetic result is reduced immediately, so two equal values always
/// have identical numerator and denominator. Text form is "p/q", with "/q"
/// omitted when q == 1.
class Rational {
public:
    Rational() = default;
    Rational(long value) : v_(value) {} // NOLINT(google-explicit-constructor)
    explicit Rational(const Integer& value) : v_(value) {}
    Rational(const Integer& num, const Integer& den);

    /// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on malformed
    /// text or a zero denominator.
    static Rational parse(std::string_view text);

    Integer numerator() const { return v_.get_num(); }
    Integer denominator() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    int sign() const { return sgn(v_); }
    bool is_integer() const { return v_.get_den() == 1; }

    Integer floor() const;
    /// x - floor(x), always in [0, 1).
    Rational frac() const;
    Rational abs() const;
    double to_double() const { return v_.get_d(); }
    std::string to_string() const;

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a);

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        const int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& x);

/// base^exp for nonnegative exp.
Integer ipow(long base, unsigned long exp);

/// base^(-exp) as an exact rational.
Rational inverse_power(long base, unsigned long exp);

/// The smallest integer >= a/b for b > 0.
Integer ceil_div(const Integer& a, const Integer& b);

/// Floor of a/b for b > 0 (rounds toward minus infinity).
Integer floor_div(const Integer& a, const Integer& b);

} // namespace takagi
