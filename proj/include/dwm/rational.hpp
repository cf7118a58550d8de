#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace dwm {

/// Exact rational number with arbitrary-precision numerator and denominator.
/// Always normalized: denominator > 0, gcd(|num|, den) = 1, zero is 0/1.
class Rational
{
	public:
		using Integer = boost::multiprecision::cpp_int;

		Rational() = default;
		Rational(int value) :
				m_value(value)
		{
		}
		Rational(long long value) :
				m_value(value)
		{
		}
		Rational(const Integer &num, const Integer &den);

		/// Parses "p", "-p" or "p/q".
		static Rational parse(const std::string &text);

		Integer numerator() const;
		Integer denominator() const;

		bool is_zero() const;
		bool is_integer() const;
		int sign() const;
		Rational abs() const;

		/// True for 0 and for +-2^k with any integer k.
		bool is_power_of_two_or_zero() const;

		/// "p" for integers, otherwise "p/q".
		std::string str() const;

		/// Correctly rounded (nearest, ties to even) conversion.
		explicit operator float() const;
		explicit operator double() const;

		Rational& operator+=(const Rational &other);
		Rational& operator-=(const Rational &other);
		Rational& operator*=(const Rational &other);
		Rational& operator/=(const Rational &other);

		friend Rational operator+(Rational a, const Rational &b)
		{
			return a += b;
		}
		friend Rational operator-(Rational a, const Rational &b)
		{
			return a -= b;
		}
		friend Rational operator*(Rational a, const Rational &b)
		{
			return a *= b;
		}
		friend Rational operator/(Rational a, const Rational &b)
		{
			return a /= b;
		}
		Rational operator-() const;

		friend bool operator==(const Rational &a, const Rational &b)
		{
			return a.m_value == b.m_value;
		}
		friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);

	private:
		explicit Rational(boost::multiprecision::cpp_rational value) :
				m_value(std::move(value))
		{
		}

		boost::multiprecision::cpp_rational m_value;
};

std::ostream& operator<<(std::ostream &stream, const Rational &r);

/// Rounds an exact rational to the nearest value with `digits` significand bits.
double round_rational(const Rational &x, int digits);

} // namespace dwm
