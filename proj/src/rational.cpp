#include <dwm/rational.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dwm {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

bool is_power_of_two(const cpp_int &x)
{
	if (x <= 0)
		return false;
	return (x & (x - 1)) == 0;
}

std::size_t bit_length(const cpp_int &x)
{
	return x == 0 ? 0 : boost::multiprecision::msb(x) + 1;
}

cpp_int parse_integer(const std::string &text, const std::string &whole)
{
	std::size_t start = 0;
	if (!text.empty() && (text[0] == '-' || text[0] == '+'))
		start = 1;
	if (start == text.size())
		throw std::invalid_argument("malformed rational '" + whole + "'");
	for (std::size_t i = start; i < text.size(); i++)
		if (text[i] < '0' || text[i] > '9')
			throw std::invalid_argument("malformed rational '" + whole + "'");
	return cpp_int(text[0] == '+' ? text.substr(1) : text);
}

}

Rational::Rational(const Integer &num, const Integer &den)
{
	if (den == 0)
		throw std::domain_error("rational with zero denominator");
	if (num == 0)
		m_value = 0;
	else if (den < 0)
		m_value = cpp_rational(Integer(-num), Integer(-den));
	else
		m_value = cpp_rational(num, den);
}

Rational Rational::parse(const std::string &text)
{
	const std::size_t slash = text.find('/');
	if (slash == std::string::npos)
		return Rational(parse_integer(text, text), cpp_int(1));
	const cpp_int num = parse_integer(text.substr(0, slash), text);
	const std::string den_text = text.substr(slash + 1);
	if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
		throw std::invalid_argument("malformed rational '" + text + "'");
	const cpp_int den = parse_integer(den_text, text);
	if (den == 0)
		throw std::invalid_argument("rational '" + text + "' has zero denominator");
	return Rational(num, den);
}

Rational::Integer Rational::numerator() const
{
	return boost::multiprecision::numerator(m_value);
}
Rational::Integer Rational::denominator() const
{
	return boost::multiprecision::denominator(m_value);
}
bool Rational::is_zero() const
{
	return m_value == 0;
}
bool Rational::is_integer() const
{
	return denominator() == 1;
}
int Rational::sign() const
{
	return m_value.sign();
}
Rational Rational::abs() const
{
	return Rational(boost::multiprecision::abs(m_value));
}

bool Rational::is_power_of_two_or_zero() const
{
	if (is_zero())
		return true;
	const cpp_int num = boost::multiprecision::abs(numerator());
	const cpp_int den = denominator();
	// normalized, so one of them is 1
	return is_power_of_two(num) && is_power_of_two(den);
}

std::string Rational::str() const
{
	if (is_integer())
		return numerator().str();
	return numerator().str() + "/" + denominator().str();
}

double round_rational(const Rational &x, int digits)
{
	if (x.is_zero())
		return 0.0;
	const cpp_int num = boost::multiprecision::abs(x.numerator());
	const cpp_int den = x.denominator();

	// choose shift so that the quotient has exactly `digits` bits
	long shift = static_cast<long>(digits) - (static_cast<long>(bit_length(num)) - static_cast<long>(bit_length(den)));
	auto quotient = [&](long s, cpp_int &rem)
	{
		cpp_int n = num;
		cpp_int d = den;
		if (s >= 0)
			n <<= s;
		else
			d <<= -s;
		cpp_int q;
		boost::multiprecision::divide_qr(n, d, q, rem);
		return std::pair<cpp_int, cpp_int> { q, d };
	};
	cpp_int rem;
	auto [q, d] = quotient(shift, rem);
	// the quotient has either `digits` or `digits + 1` bits
	if (bit_length(q) > static_cast<std::size_t>(digits))
	{
		shift--;
		std::tie(q, d) = quotient(shift, rem);
	}
	// round to nearest, ties to even
	const cpp_int twice = rem * 2;
	if (twice > d || (twice == d && (q & 1) != 0))
		q += 1;
	const double mantissa = q.convert_to<double>();
	const double result = std::ldexp(mantissa, static_cast<int>(-shift));
	return x.sign() < 0 ? -result : result;
}

Rational::operator float() const
{
	return static_cast<float>(round_rational(*this, std::numeric_limits<float>::digits));
}
Rational::operator double() const
{
	return round_rational(*this, std::numeric_limits<double>::digits);
}

Rational& Rational::operator+=(const Rational &other)
{
	m_value += other.m_value;
	return *this;
}
Rational& Rational::operator-=(const Rational &other)
{
	m_value -= other.m_value;
	return *this;
}
Rational& Rational::operator*=(const Rational &other)
{
	m_value *= other.m_value;
	return *this;
}
Rational& Rational::operator/=(const Rational &other)
{
	if (other.is_zero())
		throw std::domain_error("rational division by zero");
	m_value /= other.m_value;
	return *this;
}
Rational Rational::operator-() const
{
	return Rational(-m_value);
}

std::strong_ordering operator<=>(const Rational &a, const Rational &b)
{
	if (a.m_value < b.m_value)
		return std::strong_ordering::less;
	if (a.m_value > b.m_value)
		return std::strong_ordering::greater;
	return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream &stream, const Rational &r)
{
	return stream << r.str();
}

} // namespace dwm
