#include "takagi/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace takagi {

namespace {

bool valid_integer_text(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

Integer parse_integer(std::string_view s)
{
    if (!valid_integer_text(s)) {
        throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
    }
    if (s[0] == '+') {
        s.remove_prefix(1);
    }
    return Integer(std::string(s), 10);
}

} // namespace

Rational::Rational(const Integer& num, const Integer& den)
{
    if (den == 0) {
        throw std::invalid_argument("zero denominator");
    }
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational Rational::parse(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(text));
    }
    const Integer num = parse_integer(text.substr(0, slash));
    const auto den_text = text.substr(slash + 1);
    if (!den_text.empty() && den_text[0] == '-') {
        throw std::invalid_argument("denominator must be unsigned: '" + std::string(text) + "'");
    }
    return Rational(num, parse_integer(den_text));
}

Integer Rational::floor() const
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
}

Rational Rational::frac() const
{
    Integer rem;
    mpz_fdiv_r(rem.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return Rational(rem, v_.get_den());
}

Rational Rational::abs() const
{
    Rational out;
    out.v_ = ::abs(v_);
    return out;
}

std::string Rational::to_string() const
{
    if (v_.get_den() == 1) {
        return v_.get_num().get_str();
    }
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational& Rational::operator/=(const Rational& o)
{
    if (sgn(o.v_) == 0) {
        throw std::domain_error("division by zero");
    }
    v_ /= o.v_;
    return *this;
}

Rational operator-(const Rational& a)
{
    Rational out;
    out.v_ = -a.v_;
    return out;
}

std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.to_string(); }

Integer ipow(long base, unsigned long exp)
{
    Integer out;
    if (base >= 0) {
        mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), exp);
    } else {
        Integer b(base);
        mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), exp);
    }
    return out;
}

Rational inverse_power(long base, unsigned long exp) { return Rational(Integer(1), ipow(base, exp)); }

Integer ceil_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

} // namespace takagi
