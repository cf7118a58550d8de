#include <dwm/transform.hpp>

#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <utility>

namespace dwm {

namespace {

/// Coefficients (lowest order first) of prod (x - p) over the given points.
std::vector<Rational> monic_product(const std::vector<Rational> &roots)
{
	std::vector<Rational> coeffs { Rational(1) };
	for (const Rational &p : roots)
	{
		std::vector<Rational> next(coeffs.size() + 1);
		for (std::size_t k = 0; k < coeffs.size(); k++)
		{
			next[k + 1] += coeffs[k];
			next[k] -= p * coeffs[k];
		}
		coeffs = std::move(next);
	}
	return coeffs;
}

Rational power(const Rational &base, int exponent)
{
	Rational result(1);
	for (int i = 0; i < exponent; i++)
		result *= base;
	return result;
}

TransformSet identity_pass_through(int m)
{
	TransformSet ts;
	ts.m = m;
	ts.r = 1;
	ts.G = Matrix<Rational>(m, 1);
	ts.B_t = Matrix<Rational>(m, m);
	ts.A_t = Matrix<Rational>(m, m);
	for (int i = 0; i < m; i++)
	{
		ts.G(i, 0) = 1;
		ts.B_t(i, i) = 1;
		ts.A_t(i, i) = 1;
	}
	return ts;
}

std::vector<Rational> sliding_correlation(const std::vector<Rational> &g, const std::vector<Rational> &d, int m)
{
	std::vector<Rational> y(m);
	for (int k = 0; k < m; k++)
		for (std::size_t i = 0; i < g.size(); i++)
			y[k] += g[i] * d[k + i];
	return y;
}

}

std::vector<Rational> default_points(int count)
{
	static const std::vector<Rational> sequence { Rational(0), Rational(1), Rational(-1), Rational(2), Rational(-2), Rational(1, 2), Rational(
			-1, 2), Rational(3), Rational(-3), Rational(1, 3), Rational(-1, 3), Rational(4), Rational(-4) };
	if (count < 0)
		throw std::invalid_argument("negative point count");
	if (count > static_cast<int>(sequence.size()))
		throw std::invalid_argument("at most " + std::to_string(sequence.size()) + " default points are available, requested " + std::to_string(count));
	return std::vector<Rational>(sequence.begin(), sequence.begin() + count);
}

TransformSet cook_toom(int m, int r, const std::vector<Rational> &points)
{
	if (m < 1 || r < 1)
		throw std::invalid_argument("F(m, r) needs m >= 1 and r >= 1");
	if (r == 1 && points.empty())
		return identity_pass_through(m);

	const int l = m + r - 1;
	const int finite = l - 1;
	for (std::size_t i = 0; i < points.size(); i++)
		for (std::size_t j = i + 1; j < points.size(); j++)
			if (points[i] == points[j])
				throw std::invalid_argument("duplicate points: " + points[i].str() + " appears more than once");
	if (static_cast<int>(points.size()) != finite)
		throw std::invalid_argument(
				"F(" + std::to_string(m) + ", " + std::to_string(r) + ") needs " + std::to_string(finite) + " points, got "
						+ std::to_string(points.size()));

	TransformSet ts;
	ts.m = m;
	ts.r = r;
	ts.points = points;
	ts.G = Matrix<Rational>(l, r);
	ts.B_t = Matrix<Rational>(l, l);
	ts.A_t = Matrix<Rational>(m, l);

	for (int i = 0; i < finite; i++)
	{
		std::vector<Rational> others;
		Rational denominator(1);
		for (int j = 0; j < finite; j++)
			if (j != i)
			{
				others.push_back(points[j]);
				denominator *= points[i] - points[j];
			}
		if (denominator.is_zero())
			throw std::invalid_argument("degenerate Vandermonde system");

		const std::vector<Rational> numerator = monic_product(others);
		for (std::size_t k = 0; k < numerator.size(); k++)
			ts.B_t(i, k) = numerator[k];
		for (int k = 0; k < r; k++)
			ts.G(i, k) = power(points[i], k) / denominator;
		for (int k = 0; k < m; k++)
			ts.A_t(k, i) = power(points[i], k);

		if (i == 0 && denominator.sign() < 0)
		{
			for (int k = 0; k < l; k++)
				ts.B_t(i, k) = -ts.B_t(i, k);
			for (int k = 0; k < r; k++)
				ts.G(i, k) = -ts.G(i, k);
		}
	}

	const std::vector<Rational> full = monic_product(points);
	int lowest = 0;
	while (full[lowest].is_zero())
		lowest++;
	const Rational sign = full[lowest].sign() < 0 ? Rational(-1) : Rational(1);
	for (int k = 0; k < l; k++)
		ts.B_t(finite, k) = sign * full[k];
	ts.G(finite, r - 1) = 1;
	ts.A_t(m - 1, finite) = sign;
	return ts;
}

std::vector<Rational> apply_transform(const TransformSet &ts, const std::vector<Rational> &g, const std::vector<Rational> &d)
{
	if (static_cast<int>(g.size()) != ts.r || static_cast<int>(d.size()) != ts.l())
		throw std::invalid_argument("apply_transform: vector lengths do not match F(m, r)");
	std::vector<Rational> u = multiply(ts.G, g);
	const std::vector<Rational> v = multiply(ts.B_t, d);
	for (std::size_t i = 0; i < u.size(); i++)
		u[i] *= v[i];
	return multiply(ts.A_t, u);
}

VerifyResult verify_transform(const TransformSet &ts, int trials, std::uint64_t seed)
{
	std::mt19937_64 rng(seed);
	std::uniform_int_distribution<int> numerator(-9, 9);
	std::uniform_int_distribution<int> denominator(1, 4);
	auto random_vector = [&](int length)
	{
		std::vector<Rational> v;
		for (int i = 0; i < length; i++)
		{
			const int num = numerator(rng);
			const int den = denominator(rng);
			v.emplace_back(Rational::Integer(num), Rational::Integer(den));
		}
		return v;
	};

	VerifyResult result;
	for (int t = 0; t < trials; t++)
	{
		const std::vector<Rational> g = random_vector(ts.r);
		const std::vector<Rational> d = random_vector(ts.l());
		const std::vector<Rational> expected = sliding_correlation(g, d, ts.m);
		std::vector<Rational> actual = apply_transform(ts, g, d);
		result.trials_run++;
		if (actual != expected)
		{
			result.passed = false;
			result.counterexample = Counterexample { g, d, expected, std::move(actual) };
			break;
		}
	}
	return result;
}

std::shared_ptr<const TransformSet> transform_for(int m, int r)
{
	static std::mutex mutex;
	static std::map<std::pair<int, int>, std::shared_ptr<const TransformSet>> cache;
	std::lock_guard lock(mutex);
	auto &slot = cache[ { m, r }];
	if (!slot)
		slot = std::make_shared<const TransformSet>(r == 1 ? cook_toom(m, r, { }) : cook_toom(m, r, default_points(m + r - 2)));
	return slot;
}

template<typename T>
std::shared_ptr<const NumericTransform<T>> numeric_transform_for(int m, int r)
{
	static std::mutex mutex;
	static std::map<std::pair<int, int>, std::shared_ptr<const NumericTransform<T>>> cache;
	const auto exact = transform_for(m, r);
	std::lock_guard lock(mutex);
	auto &slot = cache[ { m, r }];
	if (!slot)
		slot = std::make_shared<const NumericTransform<T>>(to_float<T>(*exact));
	return slot;
}

template std::shared_ptr<const NumericTransform<float>> numeric_transform_for<float>(int, int);
template std::shared_ptr<const NumericTransform<double>> numeric_transform_for<double>(int, int);
template std::shared_ptr<const NumericTransform<Rational>> numeric_transform_for<Rational>(int, int);

} // namespace dwm
